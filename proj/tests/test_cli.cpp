#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "latentscope/cli.hpp"

using namespace latentscope;

namespace {

const std::string data_dir = LATENTSCOPE_TEST_DATA;
const std::string golden_dir = LATENTSCOPE_TEST_GOLDEN;

struct Run {
    int status;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "latentscope");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {status, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::string data(const std::string& name) { return data_dir + "/" + name; }

std::vector<std::string> mig_args(const std::string& ext = "csv") {
    return {"disent",       "--latents",  data("perfect_z." + ext), "--attributes",
            data("perfect_a." + ext), "--metrics", "mig",        "--discrete",
            "true",         "--seed",     "42"};
}

std::vector<std::string> dami_args(const std::string& ext = "csv") {
    return {"bundle",     "--bundle",     "dami",   "--reg-dim", "0,1",
            "--latents",  data("dependent_z." + ext), "--attributes",
            data("dependent_a." + ext), "--discrete", "true", "--seed", "42"};
}

class TempDir {
public:
    TempDir() : path_(std::filesystem::temp_directory_path() / "latentscope_test_cli") {
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    std::string file(const std::string& name, const std::string& contents) const {
        std::ofstream(path_ / name, std::ios::binary) << contents;
        return (path_ / name).string();
    }
    std::string path(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

}  // namespace

TEST(Cli, MigFixtureMatchesGolden) {
    const auto r = run(mig_args());
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out, slurp(golden_dir + "/mig_fixture.json"));
    EXPECT_NE(r.out.find("\"values\": [1.0, 1.0]"), std::string::npos);
}

TEST(Cli, DamiFixtureMatchesGolden) {
    const auto r = run(dami_args());
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out, slurp(golden_dir + "/dami_fixture.json"));
}

TEST(Cli, InterpFixtureMatchesGolden) {
    const auto r = run({"interp", "--trace", data("trace.csv"), "--samples", "2", "--attributes",
                        "2", "--delta", "0.1"});
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out, slurp(golden_dir + "/interp_fixture.json"));
}

TEST(Cli, CsvAndNpyGiveIdenticalReports) {
    EXPECT_EQ(run(mig_args("csv")).out, run(mig_args("npy")).out);
    EXPECT_EQ(run(dami_args("csv")).out, run(dami_args("npy")).out);
    const auto trace = [](const std::string& ext) {
        return run({"interp", "--trace", data("trace." + ext), "--samples", "2", "--attributes",
                    "2", "--delta", "0.1"})
            .out;
    };
    EXPECT_EQ(trace("csv"), trace("npy"));
}

TEST(Cli, ByteDeterministic) {
    auto args = mig_args();
    args[6] = "mig,sap,modularity,dmig,xmig,dlig";
    args.push_back("--latent-discrete");
    args.push_back("false");
    const auto first = run(args);
    ASSERT_EQ(first.status, 0) << first.err;
    EXPECT_EQ(first.out, run(args).out);
}

TEST(Cli, UnknownMetric) {
    const auto r = run({"disent", "--metrics", "bogus"});
    EXPECT_EQ(r.status, 1);
    EXPECT_EQ(r.err, "error: unknown metric 'bogus'; valid metrics: mig, sap, modularity, dmig, "
                     "xmig, dlig\n");
    EXPECT_TRUE(r.out.empty());
    EXPECT_EQ(run({"interp", "--trace", data("trace.csv"), "--samples", "2", "--attributes", "2",
                   "--delta", "0.1", "--metrics", "mig"})
                  .status,
              1);
    EXPECT_EQ(run({"bundle", "--bundle", "nope", "--latents", data("perfect_z.csv"),
                   "--attributes", data("perfect_a.csv")})
                  .status,
              1);
}

TEST(Cli, MissingFileIsIoError) {
    auto args = mig_args();
    args[2] = data("does_not_exist.csv");
    const auto r = run(args);
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.err.find("does_not_exist.csv"), std::string::npos);
}

TEST(Cli, UnwritableOutputIsIoError) {
    auto args = mig_args();
    args.push_back("--output");
    args.push_back(data("no_such_dir/report.json"));
    EXPECT_EQ(run(args).status, 2);
}

TEST(Cli, OutputFile) {
    const TempDir dir;
    auto args = mig_args();
    args.push_back("--output");
    args.push_back(dir.path("report.json"));
    const auto r = run(args);
    EXPECT_EQ(r.status, 0);
    EXPECT_TRUE(r.out.empty());
    EXPECT_EQ(slurp(dir.path("report.json")), slurp(golden_dir + "/mig_fixture.json"));
}

TEST(Cli, RowMismatch) {
    const TempDir dir;
    auto args = mig_args();
    args[4] = dir.file("short.csv", "a0,a1\n0,0\n1,1\n");
    const auto r = run(args);
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.err.find("rows"), std::string::npos) << r.err;
}

TEST(Cli, RegDimArity) {
    auto args = dami_args();
    args[4] = "0";
    const auto r = run(args);
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.err.find("--reg-dim"), std::string::npos) << r.err;
    args[4] = "0,9";
    EXPECT_EQ(run(args).status, 1);
}

TEST(Cli, MalformedInputs) {
    const TempDir dir;
    auto args = mig_args();
    args[4] = dir.file("bad.csv", "a0,a1\n0,nan\n");
    EXPECT_EQ(run(args).status, 1);
    args = mig_args();
    args[8] = "maybe";
    EXPECT_EQ(run(args).status, 1);
    args = mig_args();
    args[10] = "-3";
    EXPECT_EQ(run(args).status, 1);
    args = mig_args();
    args.erase(args.begin() + 1, args.begin() + 3);
    EXPECT_EQ(run(args).status, 1);
    EXPECT_EQ(run({}).status, 1);
    EXPECT_EQ(run({"disent", "--frobnicate"}).status, 1);
}

TEST(Cli, DefaultRegDimIsIdentity) {
    auto args = dami_args();
    args.erase(args.begin() + 3, args.begin() + 5);
    const auto r = run(args);
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out, slurp(golden_dir + "/dami_fixture.json"));
}

TEST(Cli, SeedNone) {
    auto args = mig_args();
    args[10] = "none";
    const auto r = run(args);
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_NE(r.out.find("\"seed\": null"), std::string::npos);
}

TEST(Cli, TraceShapeMismatch) {
    EXPECT_EQ(run({"interp", "--trace", data("trace.csv"), "--samples", "3", "--attributes", "2",
                   "--delta", "0.1"})
                  .status,
              1);
    EXPECT_EQ(run({"interp", "--trace", data("trace.csv"), "--samples", "2", "--attributes", "2",
                   "--delta", "-1"})
                  .status,
              1);
}

TEST(Cli, Help) {
    const auto r = run({"--help"});
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("disent"), std::string::npos);
    EXPECT_NE(r.out.find("interp"), std::string::npos);
}
