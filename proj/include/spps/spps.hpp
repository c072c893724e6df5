#pragma once

#include "spps/error.hpp"
#include "spps/grid.hpp"
#include "spps/formal_powers.hpp"
#include "spps/spps_core.hpp"
#include "spps/rootfind.hpp"
#include "spps/parallel.hpp"
#include "spps/sl_spectral.hpp"
#include "spps/hill.hpp"
#include "spps/schrodinger_line.hpp"
#include "spps/transmission.hpp"
#include "spps/zakharov_shabat.hpp"
