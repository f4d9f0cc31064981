#pragma once

#include "mmkit/box.hpp"
#include "mmkit/chain_limit.hpp"
#include "mmkit/construct.hpp"
#include "mmkit/errors.hpp"
#include "mmkit/gh.hpp"
#include "mmkit/glue.hpp"
#include "mmkit/io.hpp"
#include "mmkit/kuratowski.hpp"
#include "mmkit/limits.hpp"
#include "mmkit/maxflow.hpp"
#include "mmkit/metric.hpp"
#include "mmkit/order.hpp"
#include "mmkit/pipeline.hpp"
#include "mmkit/prohorov.hpp"
#include "mmkit/rational.hpp"
#include "mmkit/regularize.hpp"
#include "mmkit/space.hpp"
#include "mmkit/universal.hpp"
#include "mmkit/witness.hpp"
