#pragma once

#include "shuftext/adapter.hpp"
#include "shuftext/augment.hpp"
#include "shuftext/corpus.hpp"
#include "shuftext/errors.hpp"
#include "shuftext/eval.hpp"
#include "shuftext/factory.hpp"
#include "shuftext/models.hpp"
#include "shuftext/random.hpp"
#include "shuftext/report.hpp"
#include "shuftext/shuffle.hpp"
