#pragma once

#include "latentscope/core.hpp"
#include "latentscope/disentanglement.hpp"
#include "latentscope/estimators.hpp"
#include "latentscope/interpolatability.hpp"
#include "latentscope/predictability.hpp"
#include "latentscope/report.hpp"
#include "latentscope/result.hpp"
#include "latentscope/session.hpp"
#include "latentscope/table_io.hpp"
