#pragma once

#include "qcharm/error.hpp"
#include "qcharm/geometry.hpp"
#include "qcharm/harmonic.hpp"
#include "qcharm/catalog.hpp"
#include "qcharm/qc.hpp"
#include "qcharm/weight_profile.hpp"
#include "qcharm/weights.hpp"
#include "qcharm/lindelof.hpp"
#include "qcharm/io.hpp"
#include "qcharm/suite.hpp"
