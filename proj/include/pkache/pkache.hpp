// Copyright 2026 The pkache-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "pkache/bits.hpp"
#include "pkache/check.hpp"
#include "pkache/core.hpp"
#include "pkache/engine.hpp"
#include "pkache/harness.hpp"
#include "pkache/hyperbolic.hpp"
#include "pkache/multiregion.hpp"
#include "pkache/oracle.hpp"
#include "pkache/policies.hpp"
#include "pkache/traces.hpp"
