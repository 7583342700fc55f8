#ifndef BDGM_HPP
#define BDGM_HPP

#include "bdgm/error.hpp"
#include "bdgm/evaluate.hpp"
#include "bdgm/gcgm.hpp"
#include "bdgm/graph.hpp"
#include "bdgm/gwishart.hpp"
#include "bdgm/io.hpp"
#include "bdgm/marginal.hpp"
#include "bdgm/posterior.hpp"
#include "bdgm/rng.hpp"
#include "bdgm/sampler.hpp"
#include "bdgm/simulate.hpp"
#include "bdgm/trace.hpp"
#include "bdgm/truncnorm.hpp"

#define BDGM_VERSION "0.1.0"

#endif  // BDGM_HPP
