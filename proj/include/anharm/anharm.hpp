// anharm.hpp: umbrella header.

#pragma once

#include "anharm/errors.hpp"
#include "anharm/fock.hpp"
#include "anharm/thermal.hpp"
#include "anharm/lindblad.hpp"
#include "anharm/field.hpp"
#include "anharm/spectra.hpp"
#include "anharm/oracle.hpp"
#include "anharm/parallel.hpp"
