/*
 * Copyright 2026 The svbias Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SVBIAS_TRIAL_DATA_HPP_
#define SVBIAS_TRIAL_DATA_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace svbias {

enum class Label : std::uint8_t { kNontarget = 0, kTarget = 1 };

// One scored verification trial. The score is an opaque similarity value;
// larger means "more likely the same speaker".
struct TrialRecord {
  std::string enroll_utterance;
  std::string test_utterance;
  Label label = Label::kNontarget;
  double score = 0.0;

  bool is_target() const { return label == Label::kTarget; }
  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

enum class TrialColumn { kLabel, kEnroll, kTest, kScore };

// Column layout of a whitespace-separated trial file. The default is
// `label enroll_utt test_utt score`.
struct TrialFileFormat {
  std::array<TrialColumn, 4> columns{TrialColumn::kLabel, TrialColumn::kEnroll,
                                     TrialColumn::kTest, TrialColumn::kScore};

  // Parses a comma-separated permutation of {label, enroll, test, score}.
  static TrialFileFormat from_string(std::string_view spec);
  std::string to_string() const;
};

// Speaker id -> attribute map for one speaker.
struct SpeakerMetadata {
  std::string speaker_id;
  std::map<std::string, std::string> attributes;

  // Null when the attribute is absent or empty.
  const std::string* find(const std::string& attribute) const;
};

// All metadata rows of one file, indexed by speaker id.
class MetadataTable {
 public:
  MetadataTable() = default;
  MetadataTable(std::vector<std::string> attribute_names,
                std::vector<SpeakerMetadata> speakers);

  const std::vector<std::string>& attribute_names() const { return names_; }
  const std::vector<SpeakerMetadata>& speakers() const { return speakers_; }
  std::size_t size() const { return speakers_.size(); }
  const SpeakerMetadata* find(const std::string& speaker_id) const;

 private:
  std::vector<std::string> names_;
  std::vector<SpeakerMetadata> speakers_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Maps an utterance id to its speaker: split on `delimiter`, take the
// segment at `segment`. The default reads the VoxCeleb
// `speaker/video/clip.wav` layout.
struct SpeakerIdRule {
  char delimiter = '/';
  std::size_t segment = 0;
};

// Subgroup identity: (attribute, value) pairs in the user's attribute order.
// Equality and ordering use the canonical form (pairs sorted by attribute
// name), so keys built from differently ordered pairs compare equal.
class SubgroupKey {
 public:
  SubgroupKey() : SubgroupKey(Unknown{}) {}
  explicit SubgroupKey(std::vector<std::pair<std::string, std::string>> parts);

  // Bucket for trials whose enrollment speaker lacks metadata.
  static SubgroupKey unknown() { return SubgroupKey(Unknown{}); }

  bool is_unknown() const { return unknown_; }
  const std::vector<std::pair<std::string, std::string>>& parts() const {
    return parts_;
  }
  // Display label: lowercase values joined by '_' in attribute order,
  // whitespace removed (e.g. "ireland_f"). "unknown" for the bucket.
  std::string label() const;
  // Stable identity string, e.g. "gender=f;nationality=ireland".
  const std::string& canonical() const { return canonical_; }
  // Sorted attribute names.
  std::vector<std::string> schema() const;

  friend bool operator==(const SubgroupKey& a, const SubgroupKey& b) {
    return a.canonical_ == b.canonical_;
  }
  friend bool operator<(const SubgroupKey& a, const SubgroupKey& b) {
    return a.canonical_ < b.canonical_;
  }

 private:
  struct Unknown {};
  explicit SubgroupKey(Unknown);

  std::vector<std::pair<std::string, std::string>> parts_;
  std::string canonical_;
  bool unknown_ = false;
};

struct Provenance {
  std::vector<std::string> paths;
  std::uint64_t checksum = 0;  // FNV-1a 64 over the raw bytes of each source
};

struct SubgroupCounts {
  std::size_t n_target = 0;
  std::size_t n_nontarget = 0;
  std::size_t total() const { return n_target + n_nontarget; }
};

struct AssignmentDiagnostics {
  std::size_t unknown_trials = 0;
  // Enrollment speakers with no metadata row (sorted, unique).
  std::vector<std::string> missing_speakers;
  // Enrollment speakers with a row but an empty/absent selected attribute.
  std::vector<std::string> incomplete_speakers;
  // Trials whose test-side speaker resolves to a different subgroup than the
  // enrollment side. Recorded only; the enrollment side defines the subgroup.
  std::size_t cross_subgroup_trials = 0;
  std::vector<std::string> warnings;
};

// Parsed trials, optionally partitioned into subgroups. Treated as an
// immutable value once built.
struct TrialSet {
  std::vector<TrialRecord> records;
  Provenance provenance;

  // Populated by assign_subgroups().
  std::vector<std::string> attributes;
  std::vector<SubgroupKey> subgroups;  // canonical order, unknown bucket last
  std::vector<std::size_t> subgroup_of;    // per record, index into subgroups
  std::vector<std::string> enroll_speaker;  // per record
  AssignmentDiagnostics diagnostics;

  bool has_subgroups() const { return !subgroup_of.empty(); }
  std::vector<SubgroupCounts> counts() const;
  // Unique enrollment speakers per subgroup.
  std::vector<std::size_t> speaker_counts() const;
  // Index of `key` in subgroups, or subgroups.size() when absent.
  std::size_t find_subgroup(const SubgroupKey& key) const;
};

TrialSet parse_trials(const std::filesystem::path& path,
                      const TrialFileFormat& format = {});
TrialSet parse_trials(std::istream& in, const std::string& source_name,
                      const TrialFileFormat& format = {});
// Writes records in `format` with round-trip exact scores.
void write_trials(std::ostream& out, const std::vector<TrialRecord>& records,
                  const TrialFileFormat& format = {});

MetadataTable parse_metadata(const std::filesystem::path& path);
MetadataTable parse_metadata(std::istream& in, const std::string& source_name);
void write_metadata(std::ostream& out, const MetadataTable& table);

std::string speaker_of(std::string_view utterance_id,
                       const SpeakerIdRule& rule = {});

TrialSet assign_subgroups(TrialSet trials, const MetadataTable& metadata,
                          const std::vector<std::string>& attributes,
                          const SpeakerIdRule& rule = {});

struct CategoryShare {
  std::string attribute;
  std::string value;
  std::size_t n_speakers = 0;
  double speaker_pct = 0.0;
  std::size_t n_utterances = 0;  // utterance occurrences, once per trial side
  double utterance_pct = 0.0;
  double gap_pct = 0.0;  // utterance_pct - speaker_pct
  std::size_t rank = 0;  // 1-based, by speaker share within the attribute
};

struct CompositionReport {
  std::size_t n_speakers = 0;
  std::size_t n_utterance_occurrences = 0;
  // Per attribute, in attribute order, then by rank.
  std::vector<CategoryShare> rows;
  // attribute -> speakers lacking a value (excluded from percentages).
  std::map<std::string, std::size_t> missing_speakers;

  std::vector<CategoryShare> top(const std::string& attribute,
                                 std::size_t k) const;
};

// Speaker- and utterance-level representation of each attribute value over
// both trial sides.
CompositionReport composition_summary(const TrialSet& trials,
                                      const MetadataTable& metadata,
                                      const std::vector<std::string>& attributes,
                                      const SpeakerIdRule& rule = {});

}  // namespace svbias

#endif  // SVBIAS_TRIAL_DATA_HPP_
