#pragma once

#include "core_model.hpp"
#include "dynamics.hpp"
#include "enumeration.hpp"
#include "frame_analysis.hpp"
#include "hamiltonian.hpp"
#include "matrix.hpp"
#include "report.hpp"
#include "system_io.hpp"
