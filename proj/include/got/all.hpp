#pragma once

// Convenience header for the whole library (the CLI layer lives in got/cli.hpp).

#include "got/core.hpp"
#include "got/error.hpp"
#include "got/fused.hpp"
#include "got/gromov.hpp"
#include "got/harness.hpp"
#include "got/io.hpp"
#include "got/matrix.hpp"
#include "got/oracle.hpp"
#include "got/sinkhorn.hpp"
