#pragma once

#include "plap/cli.hpp"
#include "plap/coefficients.hpp"
#include "plap/config.hpp"
#include "plap/continuation.hpp"
#include "plap/discrete_operator.hpp"
#include "plap/eigen.hpp"
#include "plap/errors.hpp"
#include "plap/field.hpp"
#include "plap/fixtures.hpp"
#include "plap/gp_solver.hpp"
#include "plap/linalg.hpp"
#include "plap/nonlinearity.hpp"
#include "plap/output.hpp"
#include "plap/parallel.hpp"
#include "plap/phi.hpp"
#include "plap/problem.hpp"
#include "plap/shooting.hpp"
#include "plap/solution_count.hpp"
#include "plap/verify.hpp"
