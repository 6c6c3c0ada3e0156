#pragma once

#include <string>

#include "srseq/treebank_io.hpp"

#ifndef SRSEQ_DATA_DIR
#error "SRSEQ_DATA_DIR must point at the data/ directory"
#endif

namespace srseq::test_support {

inline std::string data_path(const std::string& name) { return std::string(SRSEQ_DATA_DIR) + "/" + name; }

inline Treebank load_fixture(const std::string& name) { return load_treebank(data_path(name), TreeFormat::Auto); }

inline ConstituentTree german_example() { return load_fixture("german.disc").trees.at(0); }

}  // namespace srseq::test_support
