#pragma once

// Umbrella header.

#include "pipesim/arch_state.hpp"
#include "pipesim/assembler.hpp"
#include "pipesim/benchgen.hpp"
#include "pipesim/errors.hpp"
#include "pipesim/exec.hpp"
#include "pipesim/golden.hpp"
#include "pipesim/hazard.hpp"
#include "pipesim/image.hpp"
#include "pipesim/isa.hpp"
#include "pipesim/memory.hpp"
#include "pipesim/pipeline.hpp"
#include "pipesim/report.hpp"
#include "pipesim/trace.hpp"
