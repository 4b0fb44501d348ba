#pragma once

#include "qvecca/cca.hpp"
#include "qvecca/error.hpp"
#include "qvecca/lingbuild.hpp"
#include "qvecca/matio.hpp"
#include "qvecca/metaeval.hpp"
#include "qvecca/qvec.hpp"
#include "qvecca/stats.hpp"
#include "qvecca/wordsim.hpp"
