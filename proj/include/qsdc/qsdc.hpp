#pragma once

#include "qsdc/types.hpp"
#include "qsdc/optics.hpp"
#include "qsdc/rng.hpp"
#include "qsdc/apparatus.hpp"
#include "qsdc/adversary.hpp"
#include "qsdc/protocol.hpp"
#include "qsdc/analytics.hpp"
#include "qsdc/report.hpp"
