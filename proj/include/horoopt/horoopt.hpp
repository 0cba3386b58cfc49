#pragma once

#include "horoopt/errors.hpp"
#include "horoopt/geometry.hpp"
#include "horoopt/losses.hpp"
#include "horoopt/manifold.hpp"
#include "horoopt/matrix_io.hpp"
#include "horoopt/oracle.hpp"
#include "horoopt/rogd.hpp"
#include "horoopt/spd.hpp"
