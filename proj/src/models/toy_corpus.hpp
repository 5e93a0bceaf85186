#pragma once

#include <string_view>

namespace stegocap::detail {

// Contents of data/toy_corpus.tsv: "topic<TAB>sentence" per line.
extern const std::string_view kToyCorpus;

}  // namespace stegocap::detail
