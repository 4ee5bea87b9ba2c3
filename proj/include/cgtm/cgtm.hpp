#pragma once

// Umbrella header.

#include "cgtm/errors.hpp"
#include "cgtm/jet.hpp"
#include "cgtm/expr.hpp"
#include "cgtm/linalg.hpp"
#include "cgtm/statman.hpp"
#include "cgtm/cgbundle.hpp"
#include "cgtm/curvature_pq.hpp"
#include "cgtm/oracle.hpp"
#include "cgtm/sampling.hpp"
#include "cgtm/analysis.hpp"
#include "cgtm/crosscheck.hpp"
#include "cgtm/geodesic.hpp"
#include "cgtm/models.hpp"
#include "cgtm/cli.hpp"
