#pragma once

#include "errors.hpp"
#include "version.hpp"
#include "domain.hpp"
#include "quadrature.hpp"
#include "basis.hpp"
#include "field.hpp"
#include "nonlinearity.hpp"
#include "energy.hpp"
#include "thresholds.hpp"
#include "solvers.hpp"
#include "config.hpp"
#include "report.hpp"
#include "verify.hpp"
#include "cli.hpp"
