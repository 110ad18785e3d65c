#pragma once

#include "htmlphish/experiment.hpp"

namespace htmlphish::testing {

// Desk-scale settings for the learning check: d=16, F=8, maxlens 60/200,
// five epochs, batch 20, lr 0.0015.
inline experiment::ExperimentConfig reduced_config(std::uint64_t seed = 2018) {
  experiment::ExperimentConfig c;
  c.architecture.char_maxlen = 60;
  c.architecture.word_maxlen = 200;
  c.architecture.embedding_dim = 16;
  c.architecture.filters = 8;
  c.train.epochs = 5;
  c.train.batch_size = 20;
  c.train.learning_rate = 0.0015;
  c.train.seed = seed;
  c.train.early_stop_patience.reset();
  return c;
}

}  // namespace htmlphish::testing
