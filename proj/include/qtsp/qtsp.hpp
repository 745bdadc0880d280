#pragma once

#include "qtsp/ansatz.hpp"
#include "qtsp/encoding.hpp"
#include "qtsp/errors.hpp"
#include "qtsp/harness.hpp"
#include "qtsp/instance.hpp"
#include "qtsp/nqs/checkpoint.hpp"
#include "qtsp/nqs/cnn.hpp"
#include "qtsp/nqs/rbm.hpp"
#include "qtsp/rng.hpp"
#include "qtsp/run_io.hpp"
#include "qtsp/sampler.hpp"
#include "qtsp/vmc.hpp"
