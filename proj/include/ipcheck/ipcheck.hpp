#pragma once

#include "bigcount.hpp"
#include "exhaustive.hpp"
#include "formula.hpp"
#include "harness.hpp"
#include "horn.hpp"
#include "lambda.hpp"
#include "parse.hpp"
#include "provers.hpp"
#include "random.hpp"
#include "rng.hpp"
#include "transforms.hpp"
#include "types.hpp"
