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

#include "svbias/trial_data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "svbias/error.hpp"
#include "text_util.hpp"

namespace svbias {

namespace {

constexpr std::string_view kColumnNames[] = {"label", "enroll", "test",
                                             "score"};

Label parse_label(std::string_view token, bool* ok) {
  *ok = true;
  if (token == "1" || token == "target") return Label::kTarget;
  if (token == "0" || token == "nontarget") return Label::kNontarget;
  *ok = false;
  return Label::kNontarget;
}

std::string read_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw InputError("no such file: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on " + path.string());
  return bytes;
}

std::string read_stream(std::istream& in) {
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

// Splits one CSV line, honoring double-quoted fields with "" escapes.
bool split_csv(std::string_view line, std::vector<std::string>* fields) {
  fields->clear();
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields->push_back(std::string(trim(field)));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) return false;
  fields->push_back(std::string(trim(field)));
  return true;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join_examples(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < 3; ++i) {
    if (i) out += ", ";
    out += ids[i];
  }
  if (ids.size() > 3) out += ", ...";
  return out;
}

}  // namespace

TrialFileFormat TrialFileFormat::from_string(std::string_view spec) {
  TrialFileFormat format;
  std::vector<std::string_view> parts = split(spec, ',');
  if (parts.size() != 4) {
    throw InputError("trial column layout needs 4 names, got '" +
                     std::string(spec) + "'");
  }
  std::array<bool, 4> seen{};
  for (std::size_t i = 0; i < 4; ++i) {
    const std::string_view name = trim(parts[i]);
    auto it = std::find(std::begin(kColumnNames), std::end(kColumnNames), name);
    if (it == std::end(kColumnNames)) {
      throw InputError("unknown trial column '" + std::string(name) + "'");
    }
    const auto idx = static_cast<std::size_t>(it - std::begin(kColumnNames));
    if (seen[idx]) {
      throw InputError("duplicate trial column '" + std::string(name) + "'");
    }
    seen[idx] = true;
    format.columns[i] = static_cast<TrialColumn>(idx);
  }
  return format;
}

std::string TrialFileFormat::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += kColumnNames[static_cast<std::size_t>(columns[i])];
  }
  return out;
}

const std::string* SpeakerMetadata::find(const std::string& attribute) const {
  auto it = attributes.find(attribute);
  if (it == attributes.end() || it->second.empty()) return nullptr;
  return &it->second;
}

MetadataTable::MetadataTable(std::vector<std::string> attribute_names,
                             std::vector<SpeakerMetadata> speakers)
    : names_(std::move(attribute_names)), speakers_(std::move(speakers)) {
  for (std::size_t i = 0; i < speakers_.size(); ++i) {
    if (!index_.emplace(speakers_[i].speaker_id, i).second) {
      throw InputError("duplicate speaker id '" + speakers_[i].speaker_id +
                       "'");
    }
  }
}

const SpeakerMetadata* MetadataTable::find(const std::string& speaker_id) const {
  auto it = index_.find(speaker_id);
  return it == index_.end() ? nullptr : &speakers_[it->second];
}

SubgroupKey::SubgroupKey(Unknown) : canonical_("<unknown>"), unknown_(true) {}

SubgroupKey::SubgroupKey(std::vector<std::pair<std::string, std::string>> parts)
    : parts_(std::move(parts)) {
  if (parts_.empty()) throw InputError("subgroup key needs at least one pair");
  std::vector<std::pair<std::string, std::string>> sorted = parts_;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i && sorted[i].first == sorted[i - 1].first) {
      throw InputError("attribute '" + sorted[i].first +
                       "' repeated in subgroup key");
    }
    if (i) canonical_ += ';';
    canonical_ += sorted[i].first + "=" + sorted[i].second;
  }
}

std::string SubgroupKey::label() const {
  if (unknown_) return "unknown";
  std::string out;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i) out += '_';
    for (unsigned char c : parts_[i].second) {
      if (std::isspace(c)) continue;
      out += static_cast<char>(std::tolower(c));
    }
  }
  return out;
}

std::vector<std::string> SubgroupKey::schema() const {
  std::vector<std::string> names;
  for (const auto& [name, value] : parts_) names.push_back(name);
  std::sort(names.begin(), names.end());
  return names;
}

std::vector<SubgroupCounts> TrialSet::counts() const {
  std::vector<SubgroupCounts> out(subgroups.size());
  for (std::size_t i = 0; i < subgroup_of.size(); ++i) {
    auto& c = out[subgroup_of[i]];
    if (records[i].is_target()) {
      ++c.n_target;
    } else {
      ++c.n_nontarget;
    }
  }
  return out;
}

std::vector<std::size_t> TrialSet::speaker_counts() const {
  std::vector<std::set<std::string_view>> speakers(subgroups.size());
  for (std::size_t i = 0; i < subgroup_of.size(); ++i) {
    speakers[subgroup_of[i]].insert(enroll_speaker[i]);
  }
  std::vector<std::size_t> out;
  out.reserve(speakers.size());
  for (const auto& s : speakers) out.push_back(s.size());
  return out;
}

std::size_t TrialSet::find_subgroup(const SubgroupKey& key) const {
  auto it = std::find(subgroups.begin(), subgroups.end(), key);
  return static_cast<std::size_t>(it - subgroups.begin());
}

TrialSet parse_trials(const std::filesystem::path& path,
                      const TrialFileFormat& format) {
  std::istringstream in(read_file(path));
  return parse_trials(in, path.string(), format);
}

TrialSet parse_trials(std::istream& in, const std::string& source_name,
                      const TrialFileFormat& format) {
  const std::string bytes = read_stream(in);
  TrialSet set;
  set.provenance.paths.push_back(source_name);
  set.provenance.checksum = fnv1a64(bytes);

  std::size_t line_no = 0;
  for (std::string_view line : split_lines(bytes)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    const std::vector<std::string_view> tokens = split_whitespace(body);
    if (tokens.size() != 4) {
      throw ParseError(source_name, line_no, std::string(body),
                       "expected 4 columns (" + format.to_string() + "), got " +
                           std::to_string(tokens.size()));
    }
    TrialRecord record;
    for (std::size_t col = 0; col < 4; ++col) {
      const std::string_view token = tokens[col];
      switch (format.columns[col]) {
        case TrialColumn::kLabel: {
          bool ok = false;
          record.label = parse_label(token, &ok);
          if (!ok) {
            throw ParseError(source_name, line_no, std::string(body),
                             "bad label '" + std::string(token) + "'");
          }
          break;
        }
        case TrialColumn::kEnroll:
          record.enroll_utterance = std::string(token);
          break;
        case TrialColumn::kTest:
          record.test_utterance = std::string(token);
          break;
        case TrialColumn::kScore: {
          double value = 0.0;
          if (!parse_double(token, &value)) {
            throw ParseError(source_name, line_no, std::string(body),
                             "bad score '" + std::string(token) + "'");
          }
          if (!std::isfinite(value)) {
            throw ParseError(source_name, line_no, std::string(body),
                             "non-finite score");
          }
          record.score = value;
          break;
        }
      }
    }
    set.records.push_back(std::move(record));
  }
  if (set.records.empty()) {
    throw InputError(source_name + ": no trials");
  }
  return set;
}

void write_trials(std::ostream& out, const std::vector<TrialRecord>& records,
                  const TrialFileFormat& format) {
  for (const TrialRecord& r : records) {
    for (std::size_t col = 0; col < 4; ++col) {
      if (col) out << ' ';
      switch (format.columns[col]) {
        case TrialColumn::kLabel:
          out << (r.is_target() ? '1' : '0');
          break;
        case TrialColumn::kEnroll:
          out << r.enroll_utterance;
          break;
        case TrialColumn::kTest:
          out << r.test_utterance;
          break;
        case TrialColumn::kScore:
          out << format_round_trip(r.score);
          break;
      }
    }
    out << '\n';
  }
}

MetadataTable parse_metadata(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  return parse_metadata(in, path.string());
}

MetadataTable parse_metadata(std::istream& in, const std::string& source_name) {
  std::string bytes = read_stream(in);
  if (bytes.rfind("\xEF\xBB\xBF", 0) == 0) bytes.erase(0, 3);

  std::vector<std::string> header;
  std::vector<SpeakerMetadata> speakers;
  std::set<std::string> seen;
  std::vector<std::string> fields;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(bytes)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (!split_csv(line, &fields)) {
      throw ParseError(source_name, line_no, std::string(line),
                       "unterminated quote");
    }
    if (header.empty()) {
      std::string first = fields[0];
      std::transform(first.begin(), first.end(), first.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      if (first != "speaker_id") {
        throw ParseError(source_name, line_no, std::string(line),
                         "missing header (expected 'speaker_id,<attr>,...')");
      }
      header = fields;
      std::set<std::string> names;
      for (std::size_t i = 1; i < header.size(); ++i) {
        if (header[i].empty() || !names.insert(header[i]).second) {
          throw ParseError(source_name, line_no, std::string(line),
                           "empty or duplicate attribute name '" + header[i] +
                               "'");
        }
      }
      continue;
    }
    if (fields.size() != header.size()) {
      throw ParseError(source_name, line_no, std::string(line),
                       "expected " + std::to_string(header.size()) +
                           " fields, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) {
      throw ParseError(source_name, line_no, std::string(line),
                       "empty speaker id");
    }
    if (!seen.insert(fields[0]).second) {
      throw ParseError(source_name, line_no, std::string(line),
                       "duplicate speaker id '" + fields[0] + "'");
    }
    SpeakerMetadata speaker;
    speaker.speaker_id = fields[0];
    for (std::size_t i = 1; i < fields.size(); ++i) {
      speaker.attributes.emplace(header[i], fields[i]);
    }
    speakers.push_back(std::move(speaker));
  }
  if (header.empty()) {
    throw InputError(source_name + ": missing header (empty file)");
  }
  return MetadataTable(
      std::vector<std::string>(header.begin() + 1, header.end()),
      std::move(speakers));
}

void write_metadata(std::ostream& out, const MetadataTable& table) {
  out << "speaker_id";
  for (const auto& name : table.attribute_names()) out << ',' << csv_escape(name);
  out << '\n';
  for (const auto& speaker : table.speakers()) {
    out << csv_escape(speaker.speaker_id);
    for (const auto& name : table.attribute_names()) {
      auto it = speaker.attributes.find(name);
      out << ',' << csv_escape(it == speaker.attributes.end() ? "" : it->second);
    }
    out << '\n';
  }
}

std::string speaker_of(std::string_view utterance_id, const SpeakerIdRule& rule) {
  if (utterance_id.find(rule.delimiter) == std::string_view::npos) {
    throw InputError("utterance id '" + std::string(utterance_id) +
                     "' has no '" + std::string(1, rule.delimiter) +
                     "' separator");
  }
  const std::vector<std::string_view> segments =
      split(utterance_id, rule.delimiter);
  if (rule.segment >= segments.size() || segments[rule.segment].empty()) {
    throw InputError("utterance id '" + std::string(utterance_id) +
                     "' has no speaker segment " +
                     std::to_string(rule.segment));
  }
  return std::string(segments[rule.segment]);
}

TrialSet assign_subgroups(TrialSet trials, const MetadataTable& metadata,
                          const std::vector<std::string>& attributes,
                          const SpeakerIdRule& rule) {
  if (attributes.empty()) throw InputError("no audit attributes given");
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    const auto& names = metadata.attribute_names();
    if (std::find(names.begin(), names.end(), attributes[i]) == names.end()) {
      throw InputError("attribute '" + attributes[i] +
                       "' is not a metadata column");
    }
    if (std::find(attributes.begin(), attributes.begin() + i, attributes[i]) !=
        attributes.begin() + i) {
      throw InputError("attribute '" + attributes[i] + "' listed twice");
    }
  }

  // Per-speaker key cache; speakers without usable metadata map to unknown.
  std::map<std::string, SubgroupKey> key_of_speaker;
  std::set<std::string> missing, incomplete;
  auto resolve = [&](const std::string& speaker) -> const SubgroupKey& {
    auto it = key_of_speaker.find(speaker);
    if (it != key_of_speaker.end()) return it->second;
    SubgroupKey key = SubgroupKey::unknown();
    if (const SpeakerMetadata* meta = metadata.find(speaker)) {
      std::vector<std::pair<std::string, std::string>> parts;
      for (const auto& attribute : attributes) {
        const std::string* value = meta->find(attribute);
        if (!value) break;
        parts.emplace_back(attribute, *value);
      }
      if (parts.size() == attributes.size()) {
        key = SubgroupKey(std::move(parts));
      } else {
        incomplete.insert(speaker);
      }
    } else {
      missing.insert(speaker);
    }
    return key_of_speaker.emplace(speaker, std::move(key)).first->second;
  };

  const std::size_t n = trials.records.size();
  std::vector<const SubgroupKey*> keys(n);
  trials.enroll_speaker.assign(n, {});
  std::size_t cross = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const TrialRecord& r = trials.records[i];
    trials.enroll_speaker[i] = speaker_of(r.enroll_utterance, rule);
    keys[i] = &resolve(trials.enroll_speaker[i]);
    std::string test_speaker;
    try {
      test_speaker = speaker_of(r.test_utterance, rule);
    } catch (const InputError&) {
      continue;
    }
    if (!metadata.find(test_speaker)) continue;
    const SubgroupKey& test_key = resolve(test_speaker);
    if (!keys[i]->is_unknown() && !test_key.is_unknown() &&
        !(test_key == *keys[i])) {
      ++cross;
    }
  }

  std::set<SubgroupKey> distinct;
  bool any_unknown = false;
  for (const SubgroupKey* key : keys) {
    if (key->is_unknown()) {
      any_unknown = true;
    } else {
      distinct.insert(*key);
    }
  }
  if (distinct.empty()) {
    throw InputError("no trial could be assigned to a subgroup over [" +
                     join(attributes, ",") + "]");
  }
  trials.attributes = attributes;
  trials.subgroups.assign(distinct.begin(), distinct.end());
  if (any_unknown) trials.subgroups.push_back(SubgroupKey::unknown());
  std::map<std::string, std::size_t> index;
  for (std::size_t g = 0; g < trials.subgroups.size(); ++g) {
    index.emplace(trials.subgroups[g].canonical(), g);
  }
  trials.subgroup_of.assign(n, 0);
  AssignmentDiagnostics& diag = trials.diagnostics;
  diag = {};
  for (std::size_t i = 0; i < n; ++i) {
    trials.subgroup_of[i] = index.at(keys[i]->canonical());
    if (keys[i]->is_unknown()) ++diag.unknown_trials;
  }
  diag.missing_speakers.assign(missing.begin(), missing.end());
  const std::set<std::string_view> enrolled(trials.enroll_speaker.begin(),
                                            trials.enroll_speaker.end());
  for (const auto& speaker : incomplete) {
    if (enrolled.count(speaker)) diag.incomplete_speakers.push_back(speaker);
  }
  diag.cross_subgroup_trials = cross;
  if (!diag.missing_speakers.empty()) {
    diag.warnings.push_back(
        std::to_string(diag.missing_speakers.size()) +
        " enrollment speaker(s) missing from metadata routed to the unknown "
        "bucket: " + join_examples(diag.missing_speakers));
  }
  if (!diag.incomplete_speakers.empty()) {
    diag.warnings.push_back(
        std::to_string(diag.incomplete_speakers.size()) +
        " enrollment speaker(s) lacking a selected attribute routed to the "
        "unknown bucket: " + join_examples(diag.incomplete_speakers));
  }
  return trials;
}

std::vector<CategoryShare> CompositionReport::top(const std::string& attribute,
                                                  std::size_t k) const {
  std::vector<CategoryShare> out;
  for (const auto& row : rows) {
    if (row.attribute == attribute && row.rank <= k) out.push_back(row);
  }
  return out;
}

CompositionReport composition_summary(const TrialSet& trials,
                                      const MetadataTable& metadata,
                                      const std::vector<std::string>& attributes,
                                      const SpeakerIdRule& rule) {
  std::map<std::string, std::size_t> occurrences;  // speaker -> sides
  for (const TrialRecord& r : trials.records) {
    for (const std::string* utt : {&r.enroll_utterance, &r.test_utterance}) {
      try {
        ++occurrences[speaker_of(*utt, rule)];
      } catch (const InputError&) {
        // Unresolvable ids carry no speaker; they are outside the summary.
      }
    }
  }

  CompositionReport report;
  report.n_speakers = occurrences.size();
  for (const auto& [speaker, count] : occurrences) {
    report.n_utterance_occurrences += count;
  }
  for (const auto& attribute : attributes) {
    struct Tally {
      std::size_t speakers = 0;
      std::size_t utterances = 0;
    };
    std::map<std::string, Tally> tallies;
    std::size_t known_speakers = 0, known_utterances = 0, missing = 0;
    for (const auto& [speaker, count] : occurrences) {
      const SpeakerMetadata* meta = metadata.find(speaker);
      const std::string* value = meta ? meta->find(attribute) : nullptr;
      if (!value) {
        ++missing;
        continue;
      }
      Tally& t = tallies[*value];
      ++t.speakers;
      t.utterances += count;
      ++known_speakers;
      known_utterances += count;
    }
    report.missing_speakers[attribute] = missing;

    std::vector<CategoryShare> shares;
    for (const auto& [value, t] : tallies) {
      CategoryShare share;
      share.attribute = attribute;
      share.value = value;
      share.n_speakers = t.speakers;
      share.n_utterances = t.utterances;
      share.speaker_pct = 100.0 * static_cast<double>(t.speakers) /
                          static_cast<double>(known_speakers);
      share.utterance_pct = 100.0 * static_cast<double>(t.utterances) /
                            static_cast<double>(known_utterances);
      share.gap_pct = share.utterance_pct - share.speaker_pct;
      shares.push_back(std::move(share));
    }
    std::stable_sort(shares.begin(), shares.end(),
                     [](const CategoryShare& a, const CategoryShare& b) {
                       return a.n_speakers > b.n_speakers;
                     });
    for (std::size_t i = 0; i < shares.size(); ++i) shares[i].rank = i + 1;
    report.rows.insert(report.rows.end(), shares.begin(), shares.end());
  }
  return report;
}

}  // namespace svbias
