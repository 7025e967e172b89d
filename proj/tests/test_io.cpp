#include <gtest/gtest.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <string>

#include "latentscope/report.hpp"
#include "latentscope/table_io.hpp"

using namespace latentscope;

namespace {

/// Raw NPY bytes with an arbitrary version, header and payload.
std::string npy(int major, const std::string& dict, const std::string& payload) {
    std::string header = dict;
    const std::size_t prefix = major == 1 ? 10 : 12;
    header.append((64 - (prefix + header.size() + 1) % 64) % 64, ' ');
    header.push_back('\n');
    std::string out = "\x93NUMPY";
    out.push_back(static_cast<char>(major));
    out.push_back('\0');
    const auto len = header.size();
    out.push_back(static_cast<char>(len & 0xff));
    out.push_back(static_cast<char>((len >> 8) & 0xff));
    if (major != 1) {
        out.append(2, '\0');
    }
    return out + header + payload;
}

template <typename T>
std::string bytes_of(std::initializer_list<T> values) {
    std::string out;
    for (T v : values) {
        char buf[sizeof(T)];
        std::memcpy(buf, &v, sizeof(T));
        out.append(buf, sizeof(T));
    }
    return out;
}

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Csv, HeaderAndValues) {
    const auto t = parse_csv("z0,z1\n1,2\n3,4.5\n-6,7e1\n");
    EXPECT_EQ(t.names, (std::vector<std::string>{"z0", "z1"}));
    EXPECT_EQ(t.values.rows(), 3u);
    EXPECT_EQ(t.values.cols(), 2u);
    EXPECT_EQ(t.values(1, 1), 4.5);
    EXPECT_EQ(t.values(2, 1), 70.0);
}

TEST(Csv, HeaderlessAndCrlf) {
    const auto t = parse_csv("1, 2\r\n3 ,4\r\n\n");
    EXPECT_TRUE(t.names.empty());
    EXPECT_EQ(t.values, Matrix::from_rows({{1, 2}, {3, 4}}));
}

TEST(Csv, NanCellNamesRowAndColumn) {
    const auto msg = message_of([] { parse_csv("a,b\n1,2\n3,nan\n", "data.csv"); });
    EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("data.csv"), std::string::npos) << msg;
    EXPECT_THROW(parse_csv("1,inf\n"), ValidationError);
}

TEST(Csv, Malformed) {
    EXPECT_THROW(parse_csv(""), ValidationError);
    EXPECT_THROW(parse_csv("a,b\n"), ValidationError);
    EXPECT_THROW(parse_csv("1,2\n3\n"), ValidationError);
    EXPECT_THROW(parse_csv("a,b,c\n1,2\n"), ValidationError);
    EXPECT_THROW(parse_csv("1,2\n3,x\n"), ValidationError);
}

TEST(Csv, RoundTrip) {
    const Matrix m = Matrix::from_rows({{0.1, -2.5e-300}, {1.0 / 3.0, 12345678901234567.0}});
    const auto t = parse_csv(to_csv(m, {"p", "q"}));
    EXPECT_EQ(t.values, m);
    EXPECT_EQ(t.names, (std::vector<std::string>{"p", "q"}));
}

TEST(Npy, RoundTripFloat) {
    const Matrix m = Matrix::from_rows({{1.5, -2}, {0.1, 3}, {7, 8}});
    EXPECT_EQ(parse_npy(to_npy(m)).values, m);
}

TEST(Npy, Int64) {
    const auto t = parse_npy(npy(1, "{'descr': '<i8', 'fortran_order': False, 'shape': (2, 2), }",
                                 bytes_of<std::int64_t>({1, -2, 3, 4})));
    EXPECT_EQ(t.values, Matrix::from_rows({{1, -2}, {3, 4}}));
}

TEST(Npy, Rejections) {
    const std::string f8 = "{'descr': '<f8', 'fortran_order': False, 'shape': (1, 2), }";
    const std::string payload = bytes_of<double>({1, 2});
    const auto v2 = message_of([&] { parse_npy(npy(2, f8, payload)); });
    EXPECT_NE(v2.find("version"), std::string::npos) << v2;
    EXPECT_THROW(parse_npy(npy(1, "{'descr': '<f4', 'fortran_order': False, 'shape': (1, 2), }",
                               bytes_of<float>({1, 2}))),
                 ValidationError);
    EXPECT_THROW(parse_npy(npy(1, "{'descr': '>f8', 'fortran_order': False, 'shape': (1, 2), }",
                               payload)),
                 ValidationError);
    EXPECT_THROW(parse_npy(npy(1, "{'descr': '<f8', 'fortran_order': True, 'shape': (1, 2), }",
                               payload)),
                 ValidationError);
    EXPECT_THROW(parse_npy(npy(1, "{'descr': '<f8', 'fortran_order': False, 'shape': (2,), }",
                               payload)),
                 ValidationError);
    EXPECT_THROW(parse_npy(npy(1, f8, payload.substr(0, 8))), ValidationError);
    EXPECT_THROW(parse_npy(npy(1, f8, bytes_of<double>(
                                          {1, std::numeric_limits<double>::quiet_NaN()}))),
                 ValidationError);
    EXPECT_THROW(parse_npy("not numpy"), ValidationError);
}

TEST(LoadTable, FormatFromExtensionAndIoErrors) {
    const auto dir = std::filesystem::temp_directory_path() / "latentscope_test_io";
    std::filesystem::create_directories(dir);
    const Matrix m = Matrix::from_rows({{1, 2}, {3, 4}});
    {
        std::ofstream(dir / "m.npy", std::ios::binary) << to_npy(m);
        std::ofstream(dir / "m.csv") << to_csv(m);
    }
    EXPECT_EQ(load_table(dir / "m.npy").values, m);
    EXPECT_EQ(load_table(dir / "m.csv").values, m);
    EXPECT_THROW(load_table(dir / "missing.csv"), IoError);
    std::filesystem::remove_all(dir);
}

TEST(Report, NumberFormatting) {
    EXPECT_EQ(detail::format_double(1.0), "1.0");
    EXPECT_EQ(detail::format_double(0.5), "0.5");
    EXPECT_EQ(detail::format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(detail::format_double(1e300), "1.0000000000000001e+300");
}

namespace {

ReportDocument sample_document() {
    ReportDocument doc;
    doc.config.bundle = "dami";
    doc.config.metrics = {"mig", "dmig"};
    doc.config.seed = 42;
    doc.config.reg_dim = std::vector<std::size_t>{0, 1};
    doc.config.attribute_kinds = {"discrete", "continuous"};
    doc.config.latent_kinds = {"continuous", "continuous", "discrete"};

    MetricResult m;
    m.metric_id = "mig";
    m.target_kind = TargetKind::attribute;
    m.targets = {0, 1};
    m.values = {TargetValue::ok(1.0 / 3.0), TargetValue::failed("H(a) is zero")};
    finalize(m);

    MetricResult d;
    d.metric_id = "dlig";
    d.target_kind = TargetKind::latent;
    d.targets = {0, 1};
    d.values = {TargetValue::ok(0.1), TargetValue::undefined()};
    d.values[0].warning = "something to note";
    finalize(d);

    doc.report.metrics = {m, d};
    return doc;
}

}  // namespace

TEST(Report, RoundTripIsExact) {
    const auto doc = sample_document();
    const auto text = dump_report(doc);
    const auto back = parse_report(text);
    EXPECT_EQ(back, doc);
    EXPECT_EQ(dump_report(back), text);
}

TEST(Report, Layout) {
    const auto text = dump_report(sample_document());
    const auto j = nlohmann::json::parse(text);
    EXPECT_EQ(j["schema_version"], 1);
    EXPECT_EQ(j["config"]["seed"], 42);
    EXPECT_TRUE(j["config"]["delta"].is_null());
    const auto& mig = j["metrics"]["mig"];
    EXPECT_EQ(mig["target_kind"], "attribute");
    EXPECT_TRUE(mig["values"][1].is_null());
    EXPECT_EQ(mig["errors"][1], "H(a) is zero");
    EXPECT_TRUE(mig["errors"][0].is_null());
    EXPECT_EQ(j["metrics"]["dlig"]["target_kind"], "latent");
    EXPECT_NE(text.find("\"values\": [0.33333333333333331, null]"), std::string::npos) << text;
    EXPECT_EQ(text.back(), '\n');
}

TEST(Report, ParseErrors) {
    EXPECT_THROW(parse_report("{"), ValidationError);
    EXPECT_THROW(parse_report("{\"schema_version\": 2}"), ValidationError);
}
