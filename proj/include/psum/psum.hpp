#pragma once

#include "common.hpp"
#include "naive_oracle.hpp"
#include "simd.hpp"
#include "node.hpp"
#include "segment_tree.hpp"
#include "segment_tree_bary.hpp"
#include "fenwick_tree.hpp"
#include "fenwick_tree_bary.hpp"
#include "fenwick_tree_blocked.hpp"
#include "fenwick_tree_truncated.hpp"
#include "cache_model.hpp"
#include "workload.hpp"
#include "bench.hpp"
#include "registry.hpp"
#include "verify.hpp"
