#pragma once

// A multiple-choice instance: one context, a question and candidate options,
// exactly one of which is correct.

#include <string>
#include <vector>

#include "adalogn/ingest.hpp"
#include "adalogn/tlg.hpp"

namespace adalogn {

struct TaskInstance {
  std::string id;
  Tlg context;               // context nodes only
  std::string question;
  std::vector<Tlg> options;  // option nodes only
  std::vector<std::string> option_texts;
  int gold = 0;

  /// Raw TLG of the context joined with option i.
  [[nodiscard]] Tlg option_tlg(std::size_t i) const { return join_option(context, options.at(i)); }
};

}  // namespace adalogn
