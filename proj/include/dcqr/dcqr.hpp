#pragma once

#include "dcqr/constants.hpp"
#include "dcqr/device.hpp"
#include "dcqr/grid.hpp"
#include "dcqr/hamiltonian.hpp"
#include "dcqr/eigensolver.hpp"
#include "dcqr/selfmass.hpp"
#include "dcqr/flow.hpp"
#include "dcqr/io.hpp"
#include "dcqr/svg.hpp"
#include "dcqr/run.hpp"
