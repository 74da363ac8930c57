#pragma once

#include "fireball/analytic.hpp"
#include "fireball/dual.hpp"
#include "fireball/dynamics.hpp"
#include "fireball/errors.hpp"
#include "fireball/hydro.hpp"
#include "fireball/integrate.hpp"
#include "fireball/invariants.hpp"
#include "fireball/model.hpp"
#include "fireball/ode.hpp"
#include "fireball/quadrature.hpp"
#include "fireball/symmetry.hpp"
