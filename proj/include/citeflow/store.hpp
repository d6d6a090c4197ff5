#pragma once

#include <string>

#include "citeflow/corpus.hpp"

namespace citeflow {

// Columnar single-file corpus store with a versioned header. Byte layout is
// documented in docs/store_format.md; writing is deterministic so identical
// corpora produce identical files.
void save_store(const Corpus& corpus, const std::string& path);
Corpus load_store(const std::string& path);

}  // namespace citeflow
