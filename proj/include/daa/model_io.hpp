#pragma once

#include <filesystem>
#include <iosfwd>

#include "daa/model.hpp"

namespace daa {

inline constexpr int kModelFormatVersion = 1;

// A fitted model as stored on disk. Assignments and document-topic counts of
// the training corpus are not stored; prediction does not need them.
struct ModelFile {
  ModelState state;
  Preprocessing preprocessing;
};

void save_model(const ModelState& state, const Preprocessing& preprocessing, std::ostream& out);
void save_model(const ModelState& state, const Preprocessing& preprocessing,
                const std::filesystem::path& path);

// Throws Error when the version is newer than kModelFormatVersion or the stored
// vocabulary checksum does not match the vocabulary.
ModelFile load_model(std::istream& in);
ModelFile load_model(const std::filesystem::path& path);

std::uint64_t vocabulary_checksum(const Vocabulary& vocabulary);

}  // namespace daa
