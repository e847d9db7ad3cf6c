#pragma once

#include "errors.hpp"
#include "log_scaled.hpp"
#include "gauss_legendre.hpp"
#include "parallel.hpp"
#include "density_query.hpp"
#include "contour.hpp"
#include "kernel.hpp"
#include "z_integral.hpp"
#include "series.hpp"
#include "airy.hpp"
#include "tracy_widom.hpp"
#include "geodesic.hpp"
#include "asymptotics.hpp"
#include "oracle.hpp"
