#pragma once

#include "adnorm/error.hpp"
#include "adnorm/random.hpp"
#include "adnorm/matrix_core.hpp"
#include "adnorm/simplex.hpp"
#include "adnorm/polytope.hpp"
#include "adnorm/gauge.hpp"
#include "adnorm/norms.hpp"
#include "adnorm/majorization.hpp"
#include "adnorm/geometry.hpp"
#include "adnorm/io.hpp"
#include "adnorm/verify.hpp"
