#pragma once

#include "bitopic/corpus.hpp"
#include "bitopic/corpus_io.hpp"
#include "bitopic/embeddings.hpp"
#include "bitopic/evaluation.hpp"
#include "bitopic/matrix.hpp"
#include "bitopic/model.hpp"
#include "bitopic/model_io.hpp"
#include "bitopic/rng.hpp"
#include "bitopic/sampler.hpp"
#include "bitopic/segmentation.hpp"
#include "bitopic/vocabulary.hpp"
