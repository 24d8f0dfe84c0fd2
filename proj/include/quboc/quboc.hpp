#pragma once

// Umbrella header.

#include "quboc/bench.hpp"
#include "quboc/encodings.hpp"
#include "quboc/error.hpp"
#include "quboc/expr.hpp"
#include "quboc/logic.hpp"
#include "quboc/model.hpp"
#include "quboc/poly.hpp"
#include "quboc/problems.hpp"
#include "quboc/qubo_file.hpp"
#include "quboc/solve.hpp"
