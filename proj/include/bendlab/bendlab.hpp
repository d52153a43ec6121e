#pragma once

#include "errors.hpp"
#include "geometry.hpp"
#include "generators.hpp"
#include "signals.hpp"
#include "pgm.hpp"
#include "quadrature.hpp"
#include "parallel.hpp"
#include "transform.hpp"
#include "rational.hpp"
#include "analysis.hpp"
#include "serialize.hpp"
#include "config.hpp"
#include "selftest.hpp"
#include "commands.hpp"
