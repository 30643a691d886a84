#pragma once

// Umbrella header.

#include "mspace/cli.hpp"
#include "mspace/exponential.hpp"
#include "mspace/finite_frame.hpp"
#include "mspace/generator.hpp"
#include "mspace/machine.hpp"
#include "mspace/parser.hpp"
#include "mspace/presentation.hpp"
#include "mspace/quantifier.hpp"
#include "mspace/rational.hpp"
#include "mspace/runtime.hpp"
#include "mspace/semidecider.hpp"
#include "mspace/spaces.hpp"
