#pragma once

#include "textmine/classify.hpp"
#include "textmine/corpus.hpp"
#include "textmine/embed.hpp"
#include "textmine/errors.hpp"
#include "textmine/features.hpp"
#include "textmine/keywords.hpp"
#include "textmine/lexicon.hpp"
#include "textmine/report.hpp"
