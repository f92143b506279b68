#pragma once

#include "melic/corpus.hpp"
#include "melic/error.hpp"
#include "melic/genmodel.hpp"
#include "melic/infotheory.hpp"
#include "melic/parallel.hpp"
#include "melic/ppm.hpp"
#include "melic/random.hpp"
#include "melic/rational.hpp"
#include "melic/repetition.hpp"
#include "melic/stats.hpp"
#include "melic/summary.hpp"
#include "melic/table.hpp"
#include "melic/viewpoints.hpp"
