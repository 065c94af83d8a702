#pragma once

#include "domes/census.hpp"
#include "domes/cobordism.hpp"
#include "domes/curve.hpp"
#include "domes/dome.hpp"
#include "domes/error.hpp"
#include "domes/geom.hpp"
#include "domes/io.hpp"
#include "domes/moduli.hpp"
#include "domes/steinitz.hpp"
#include "domes/surface.hpp"
