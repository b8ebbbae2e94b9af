#pragma once

#include "razavy/errors.hpp"
#include "razavy/format.hpp"
#include "razavy/grid.hpp"
#include "razavy/heun.hpp"
#include "razavy/heun_shoot.hpp"
#include "razavy/numerov.hpp"
#include "razavy/potential.hpp"
#include "razavy/report.hpp"
#include "razavy/sampled_function.hpp"
#include "razavy/spectrum.hpp"
#include "razavy/tridiagonal.hpp"
