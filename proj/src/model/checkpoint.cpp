// SPDX-License-Identifier: Apache-2.0
#include "corerev/model/checkpoint.hpp"

#include <fstream>

#include <fmt/core.h>
#include <json.hpp>

#include "corerev/binary_io.hpp"
#include "corerev/error.hpp"

namespace corerev::model {

namespace {

using nlohmann::json;
using tensornet::Tensor;

json history_json(const TrainingHistory& h) {
  json valid = json::array();
  for (const auto& v : h.valid_mrr) valid.push_back(v ? json(*v) : json(nullptr));
  return {{"initial_loss", h.initial_loss}, {"train_loss", h.train_loss}, {"valid_mrr", valid}};
}

TrainingHistory history_from_json(const json& j) {
  TrainingHistory h;
  h.initial_loss = j.at("initial_loss").get<double>();
  h.train_loss = j.at("train_loss").get<std::vector<double>>();
  for (const auto& v : j.at("valid_mrr")) {
    h.valid_mrr.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
  }
  return h;
}

json vocab_json(const ModelVocabs& v) {
  // Alphabet entries are raw bytes, which JSON strings cannot always hold.
  std::vector<int> bytes;
  for (char c : v.chars.chars()) bytes.push_back(static_cast<unsigned char>(c));
  return {{"code", v.code.tokens()},
          {"review", v.review.tokens()},
          {"alphabet_size", v.chars.size()},
          {"alphabet", bytes}};
}

ModelVocabs vocabs_from_json(const json& j) {
  std::string chars;
  for (int b : j.at("alphabet").get<std::vector<int>>()) {
    if (b < 0 || b > 255) throw DataError("alphabet byte out of range");
    chars.push_back(static_cast<char>(b));
  }
  return ModelVocabs{embed::Vocab::from_tokens(j.at("code").get<std::vector<std::string>>()),
                     embed::Vocab::from_tokens(j.at("review").get<std::vector<std::string>>()),
                     embed::CharAlphabet::from_chars(chars, j.at("alphabet_size").get<std::size_t>())};
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  json arrays = json::array();
  std::size_t offset = 0;
  ck.params.for_each([&](const std::string& name, const Tensor& t) {
    arrays.push_back({{"name", name}, {"shape", t.shape()}, {"offset", offset}, {"count", t.size()}});
    offset += t.size();
  });
  json header = {{"format", "corerev-checkpoint"},
                 {"version", kCheckpointVersion},
                 {"config", to_json(ck.config)},
                 {"arrays", arrays},
                 {"payload_floats", offset},
                 {"vocab", vocab_json(ck.vocabs)},
                 {"history", history_json(ck.history)}};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
  out << header.dump() << '\n';
  std::vector<float> buffer;
  ck.params.for_each([&](const std::string&, const Tensor& t) {
    buffer.assign(t.values().begin(), t.values().end());
    write_f32_le(out, buffer);
  });
  out.close();
  if (!out) throw DataError(fmt::format("failed writing {}", path.string()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open checkpoint {}", path.string()));
  std::string line;
  if (!std::getline(in, line) || in.eof()) {
    throw DataError(fmt::format("{}: truncated checkpoint header", path.string()));
  }
  try {
    json header = json::parse(line);
    if (header.value("format", "") != "corerev-checkpoint") {
      throw DataError(fmt::format("{}: not a checkpoint file", path.string()));
    }
    int version = header.value("version", 0);
    if (version != kCheckpointVersion) {
      throw DataError(fmt::format("{}: checkpoint version {} (expected {})", path.string(),
                                  version, kCheckpointVersion));
    }
    Checkpoint ck;
    ck.config = model_config_from_json(header.at("config"));
    ck.vocabs = vocabs_from_json(header.at("vocab"));
    ck.history = history_from_json(header.at("history"));
    ck.params = CoreModelParams::zeros(ck.config, ck.vocabs.code.size(), ck.vocabs.review.size());

    const json& arrays = header.at("arrays");
    std::size_t i = 0, offset = 0;
    std::vector<float> buffer;
    ck.params.for_each([&](const std::string& name, Tensor& t) {
      if (i >= arrays.size()) throw DataError(fmt::format("manifest lacks {}", name));
      const json& a = arrays[i++];
      if (a.at("name").get<std::string>() != name ||
          a.at("shape").get<std::vector<std::size_t>>() != t.shape() ||
          a.at("offset").get<std::size_t>() != offset || a.at("count").get<std::size_t>() != t.size()) {
        throw DataError(fmt::format("manifest entry {} does not match the config", name));
      }
      buffer.resize(t.size());
      if (!read_f32_le(in, buffer)) {
        throw DataError(fmt::format("{}: payload truncated in {}", path.string(), name));
      }
      for (std::size_t k = 0; k < t.size(); ++k) t[k] = static_cast<double>(buffer[k]);
      offset += t.size();
    });
    if (i != arrays.size() || header.at("payload_floats").get<std::size_t>() != offset) {
      throw DataError(fmt::format("{}: manifest size mismatch", path.string()));
    }
    if (in.peek() != std::char_traits<char>::eof()) {
      throw DataError(fmt::format("{}: trailing bytes after payload", path.string()));
    }
    return ck;
  } catch (const json::exception& e) {
    throw DataError(fmt::format("{}: malformed checkpoint header: {}", path.string(), e.what()));
  } catch (const ConfigError& e) {
    throw DataError(fmt::format("{}: invalid checkpoint config: {}", path.string(), e.what()));
  }
}

}  // namespace corerev::model
