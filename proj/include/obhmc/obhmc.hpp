#pragma once

// One-bit Hankel matrix completion for sparse-array radar: umbrella header.

#include "obhmc/array_model.hpp"
#include "obhmc/experiment.hpp"
#include "obhmc/fft.hpp"
#include "obhmc/hankel.hpp"
#include "obhmc/parallel.hpp"
#include "obhmc/quantization.hpp"
#include "obhmc/rng.hpp"
#include "obhmc/serialize.hpp"
#include "obhmc/spectrum.hpp"
#include "obhmc/svt.hpp"
#include "obhmc/theory.hpp"
