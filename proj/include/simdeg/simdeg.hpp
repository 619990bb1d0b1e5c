#pragma once

#include "simdeg/analytic.hpp"
#include "simdeg/errors.hpp"
#include "simdeg/exact.hpp"
#include "simdeg/io.hpp"
#include "simdeg/logspace.hpp"
#include "simdeg/model.hpp"
#include "simdeg/oracle.hpp"
#include "simdeg/rng.hpp"
