#pragma once

#include "resonance/types.hpp"
#include "resonance/linalg.hpp"
#include "resonance/quadrature.hpp"
#include "resonance/parallel.hpp"
#include "resonance/model.hpp"
#include "resonance/spectral.hpp"
#include "resonance/lso.hpp"
#include "resonance/dynamics.hpp"
#include "resonance/dephasing.hpp"
#include "resonance/equilibrium.hpp"
#include "resonance/register.hpp"
