#ifndef GFSIG_GFSIG_HPP
#define GFSIG_GFSIG_HPP

#include "gfsig/analysis.hpp"
#include "gfsig/coherence.hpp"
#include "gfsig/detectors.hpp"
#include "gfsig/experiment.hpp"
#include "gfsig/galois.hpp"
#include "gfsig/rng.hpp"
#include "gfsig/seqgen.hpp"
#include "gfsig/simulator.hpp"
#include "gfsig/types.hpp"

#endif  // GFSIG_GFSIG_HPP
