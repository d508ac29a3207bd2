#pragma once

#include <string_view>

namespace behavsteg {

/// Demo-grade sentiment scorer: mean valence of the words found in a small
/// built-in lexicon, in [-1, 1]. Returns 0 when no word is known. Not a
/// substitute for a trained sentiment model.
double lexicon_sentiment(std::string_view text);

}  // namespace behavsteg
