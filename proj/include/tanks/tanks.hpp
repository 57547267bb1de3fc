#pragma once

#include "tanks/error.hpp"
#include "tanks/scalar.hpp"
#include "tanks/matrix.hpp"
#include "tanks/linear_solve.hpp"
#include "tanks/network.hpp"
#include "tanks/markov.hpp"
#include "tanks/flow.hpp"
#include "tanks/solvers.hpp"
#include "tanks/network_io.hpp"
#include "tanks/result_io.hpp"
#include "tanks/generator.hpp"
