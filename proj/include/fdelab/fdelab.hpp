#pragma once

// Umbrella header for the whole library.

#include "expr.hpp"         // coefficient expression language + piecewise functions
#include "quadrature.hpp"   // adaptive Gauss-Kronrod with breakpoint panels
#include "sign.hpp"         // forcing sign-pattern detection
#include "rk.hpp"           // embedded RK pair with continuous extension
#include "trajectory.hpp"   // dense solutions + zero detection
#include "integrator.hpp"   // Cauchy problems by the method of steps, conjugate scans
#include "riccati.hpp"      // functional Riccati equation, transforms, blow-up
#include "comparison.hpp"   // scalar and functional comparison verifiers
#include "verdict.hpp"      // hypothesis-check and verdict vocabulary
#include "criteria.hpp"     // oscillation / non-oscillation criterion checkers
#include "presets.hpp"      // bundled reference scenarios
#include "report.hpp"       // JSON / CSV serialization
#include "config.hpp"       // scenario configuration
#include "reproduce.hpp"    // end-to-end scenario runs
