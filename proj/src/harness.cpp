#include "hide/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "hide/text.hpp"

namespace hide {

using nlohmann::json;

namespace {

std::unordered_map<std::string, std::string> parse_key_values(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());

    std::unordered_map<std::string, std::string> kv;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        std::string_view view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line_number) +
                              " is not 'key = value'");
        std::string key(trim(view.substr(0, eq)));
        std::string value(trim(view.substr(eq + 1)));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(line_number) +
                              " has an empty key");
        kv[key] = value;
    }
    return kv;
}

double to_double(const std::string& key, const std::string& value) {
    try {
        return std::stod(value);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is not a number: " + value);
    }
}

long to_long(const std::string& key, const std::string& value) {
    long out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size())
        throw ConfigError("config key '" + key + "' is not an integer: " + value);
    return out;
}

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

}  // namespace

RunManifest load_manifest(const std::filesystem::path& config_path) {
    const auto kv = parse_key_values(config_path);
    RunManifest m;

    auto get = [&](const char* key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    if (auto* v = get("run_id")) m.run_id = *v;
    if (auto* v = get("corpus")) m.corpus_path = *v;
    if (auto* v = get("train_fraction"))
        m.split.train_fraction = to_double("train_fraction", *v);
    if (auto* v = get("seed"))
        m.split.seed = static_cast<std::uint64_t>(to_long("seed", *v));
    if (auto* v = get("out_dir")) m.out_dir = *v;
    if (auto* v = get("similarity_floor"))
        m.similarity_floor = to_double("similarity_floor", *v);

    if (auto* v = get("encoder.kind"))
        m.encoder.kind = *v == "remote" ? EncoderKind::remote
                                        : EncoderKind::feature_hash;
    if (auto* v = get("encoder.dim"))
        m.encoder.dim = static_cast<int>(to_long("encoder.dim", *v));
    if (auto* v = get("encoder.endpoint")) m.encoder.endpoint = *v;
    if (auto* v = get("encoder.model")) m.encoder.model = *v;
    if (auto* v = get("encoder.max_in_flight"))
        m.encoder.max_in_flight =
            static_cast<int>(to_long("encoder.max_in_flight", *v));
    if (auto* v = get("encoder.timeout_ms"))
        m.encoder.timeout_ms = static_cast<int>(to_long("encoder.timeout_ms", *v));

    if (auto* v = get("discriminator.threshold"))
        m.discriminator.threshold = to_double("discriminator.threshold", *v);
    if (auto* v = get("discriminator.score_kind"))
        m.discriminator.score_kind = score_kind_from_string(*v);

    if (auto* v = get("model.backend"))
        m.generation.backend = backend_from_string(*v);
    if (auto* v = get("model.endpoint")) m.generation.endpoint = *v;
    if (auto* v = get("model.name")) m.generation.model_name = *v;
    if (auto* v = get("model.temperature"))
        m.generation.temperature = to_double("model.temperature", *v);
    if (auto* v = get("model.top_k"))
        m.generation.top_k = static_cast<int>(to_long("model.top_k", *v));
    if (auto* v = get("model.max_tokens"))
        m.generation.max_tokens = static_cast<int>(to_long("model.max_tokens", *v));
    if (auto* v = get("model.timeout_ms"))
        m.generation.timeout_ms = static_cast<int>(to_long("model.timeout_ms", *v));
    if (auto* v = get("model.max_retries"))
        m.generation.max_retries =
            static_cast<int>(to_long("model.max_retries", *v));
    if (auto* v = get("model.backoff_ms"))
        m.generation.backoff_ms = static_cast<int>(to_long("model.backoff_ms", *v));
    if (auto* v = get("model.max_concurrency"))
        m.generation.max_concurrency =
            static_cast<int>(to_long("model.max_concurrency", *v));
    if (auto* v = get("model.stub_table")) m.generation.stub_table_path = *v;

    if (m.discriminator.threshold < 0.0 || m.discriminator.threshold > 1.0)
        throw ConfigError("discriminator.threshold must lie in [0,1]");
    return m;
}

void save_manifest(const RunManifest& m, const std::filesystem::path& path) {
    json obj{{"run_id", m.run_id},
             {"corpus", m.corpus_path},
             {"train_fraction", m.split.train_fraction},
             {"seed", m.split.seed},
             {"out_dir", m.out_dir},
             {"similarity_floor", m.similarity_floor},
             {"encoder",
              {{"kind", m.encoder.kind == EncoderKind::remote ? "remote"
                                                              : "feature_hash"},
               {"dim", m.encoder.dim},
               {"endpoint", m.encoder.endpoint},
               {"model", m.encoder.model}}},
             {"discriminator",
              {{"threshold", m.discriminator.threshold},
               {"score_kind", std::string(to_string(m.discriminator.score_kind))}}},
             {"model",
              {{"backend", std::string(to_string(m.generation.backend))},
               {"endpoint", m.generation.endpoint},
               {"name", m.generation.model_name},
               {"temperature", m.generation.temperature},
               {"top_k", m.generation.top_k},
               {"max_tokens", m.generation.max_tokens},
               {"timeout_ms", m.generation.timeout_ms},
               {"max_retries", m.generation.max_retries},
               {"stub_table", m.generation.stub_table_path}}},
             {"created_at", m.created_at.empty() ? iso8601_now() : m.created_at}};
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot write manifest: " + path.string());
    out << obj.dump(2) << '\n';
}

void PredictionSet::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot write prediction set: " + path.string());

    json header{{"kind", "hide-predictions"},
                {"format_version", kFormatVersion},
                {"run_id", run_id},
                {"hide_pass", hide_pass},
                {"count", items.size()}};
    out << header.dump() << '\n';
    for (const auto& item : items) {
        json obj{{"idiom_id", item.idiom_id},
                 {"prompt", item.prompt},
                 {"translation", item.translation},
                 {"explanation", item.explanation},
                 {"ok", item.ok}};
        if (!item.ok) obj["error"] = item.error;
        if (item.retrieved_entry_index)
            obj["retrieved_entry_index"] = *item.retrieved_entry_index;
        if (item.retrieval_similarity)
            obj["retrieval_similarity"] = *item.retrieval_similarity;
        out << obj.dump() << '\n';
    }
    if (!out) throw IoFailure("write failed: " + path.string());
}

PredictionSet PredictionSet::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open prediction set: " + path.string());

    std::string line;
    if (!std::getline(in, line))
        throw IoFailure("prediction set file is empty: " + path.string());
    json header = json::parse(line, nullptr, false);
    if (header.is_discarded() || header.value("kind", "") != "hide-predictions")
        throw FormatVersionMismatch("not a prediction set file: " + path.string());
    if (header.value("format_version", -1) != kFormatVersion)
        throw FormatVersionMismatch("unsupported prediction set format version");

    PredictionSet set;
    set.run_id = header.at("run_id").get<std::string>();
    set.hide_pass = header.at("hide_pass").get<bool>();
    const auto expected = header.at("count").get<std::size_t>();

    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded())
            throw IoFailure("prediction entry is not valid JSON");
        PredictionItem item;
        item.idiom_id = obj.at("idiom_id").get<std::string>();
        item.prompt = obj.at("prompt").get<std::string>();
        item.translation = obj.at("translation").get<std::string>();
        item.explanation = obj.at("explanation").get<std::string>();
        item.ok = obj.at("ok").get<bool>();
        if (obj.contains("error")) item.error = obj["error"].get<std::string>();
        if (obj.contains("retrieved_entry_index"))
            item.retrieved_entry_index =
                obj["retrieved_entry_index"].get<std::size_t>();
        if (obj.contains("retrieval_similarity"))
            item.retrieval_similarity = obj["retrieval_similarity"].get<double>();
        set.items.push_back(std::move(item));
    }
    if (set.items.size() != expected)
        throw IoFailure("prediction count mismatch: header says " +
                        std::to_string(expected) + ", found " +
                        std::to_string(set.items.size()));
    return set;
}

namespace {

// Fans prompts out to the client with bounded workers; results land at
// their input index, so output order always matches input order.
void generate_all(const std::vector<std::string>& prompts,
                  const ModelClient& client,
                  std::vector<PredictionItem>& items) {
    const std::size_t n = prompts.size();
    const std::size_t workers = std::min<std::size_t>(
        std::max(1, client.config().max_concurrency), n == 0 ? 1 : n);

    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                GenerationResult result = client.generate(prompts[i]);
                items[i].translation = std::move(result.translation);
                items[i].explanation = std::move(result.explanation);
                items[i].ok = true;
            } catch (const Error& e) {
                items[i].ok = false;
                items[i].error = e.what();
            }
        }
    };

    if (workers <= 1) {
        work();
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
}

std::unordered_map<std::string, const IdiomRecord*> index_by_id(
    std::span<const IdiomRecord> records) {
    std::unordered_map<std::string, const IdiomRecord*> index;
    for (const auto& rec : records) index[rec.id] = &rec;
    return index;
}

}  // namespace

PredictionSet run_baseline(std::span<const IdiomRecord> test_records,
                           const ModelClient& client, const std::string& run_id) {
    PredictionSet set;
    set.run_id = run_id;
    set.hide_pass = false;
    set.items.resize(test_records.size());

    std::vector<std::string> prompts;
    prompts.reserve(test_records.size());
    for (std::size_t i = 0; i < test_records.size(); ++i) {
        set.items[i].idiom_id = test_records[i].id;
        set.items[i].prompt = build_prompt(test_records[i].idiom);
        prompts.push_back(set.items[i].prompt);
    }
    generate_all(prompts, client, set.items);
    return set;
}

Repository build_repository(const PredictionSet& predictions,
                            std::span<const IdiomRecord> gold_records,
                            const Encoder& encoder,
                            const DiscriminatorConfig& discriminator) {
    const auto gold_index = index_by_id(gold_records);
    Repository repo(encoder.dim(), encoder.fingerprint());

    for (const auto& item : predictions.items) {
        if (!item.ok) continue;  // nothing to archive for a failed call
        auto it = gold_index.find(item.idiom_id);
        if (it == gold_index.end())
            throw JoinFailure("prediction id '" + item.idiom_id +
                              "' has no gold record");
        const IdiomRecord& gold = *it->second;

        const auto judgement =
            is_error(item.explanation, gold.gold_explanation, discriminator,
                     &encoder);
        if (!judgement.flag) continue;

        const Hint hint =
            generate_hint(item.explanation, gold.gold_explanation, gold.idiom,
                          gold.gold_translation, discriminator);
        ErrorQuintuple q;
        q.idiom_id = gold.id;
        q.idiom = gold.idiom;
        q.pred_translation =
            item.translation.empty() ? "(none)" : item.translation;
        q.pred_explanation = item.explanation;
        q.gold_translation = gold.gold_translation;
        q.gold_explanation = gold.gold_explanation;
        repo.ingest(q, hint, encoder.encode(gold.idiom));
    }
    return repo;
}

PredictionSet run_hide(std::span<const IdiomRecord> test_records,
                       const Repository& repository, const Encoder& encoder,
                       const ModelClient& client, double similarity_floor,
                       const std::string& run_id) {
    if (repository.empty()) throw EmptyRepository();
    repository.require_encoder(encoder);

    PredictionSet set;
    set.run_id = run_id;
    set.hide_pass = true;
    set.items.resize(test_records.size());

    std::vector<std::string> prompts;
    prompts.reserve(test_records.size());
    for (std::size_t i = 0; i < test_records.size(); ++i) {
        const IdiomRecord& rec = test_records[i];
        set.items[i].idiom_id = rec.id;

        const RetrievalResult hit = repository.retrieve_nearest(encoder.encode(rec.idiom));
        set.items[i].retrieved_entry_index = hit.entry->entry_index;
        set.items[i].retrieval_similarity = hit.similarity;

        std::optional<Hint> hint;
        if (hit.similarity >= similarity_floor) hint = hit.entry->hint;
        set.items[i].prompt = build_prompt(rec.idiom, hint);
        prompts.push_back(set.items[i].prompt);
    }
    generate_all(prompts, client, set.items);
    return set;
}

EvaluationResult evaluate_predictions(const PredictionSet& predictions,
                                      std::span<const IdiomRecord> gold_records,
                                      const Encoder& encoder,
                                      const UnigramLm& lm) {
    if (predictions.items.empty()) throw EmptyInput("prediction set is empty");
    const auto gold_index = index_by_id(gold_records);

    // Join and filter first, then score pairs in parallel; rows land at
    // their input position so aggregation order stays deterministic.
    EvaluationResult result;
    std::vector<std::pair<const PredictionItem*, const IdiomRecord*>> pairs;
    for (const auto& item : predictions.items) {
        auto it = gold_index.find(item.idiom_id);
        if (it == gold_index.end())
            throw JoinFailure("prediction id '" + item.idiom_id +
                              "' has no gold record");
        if (!item.ok || tokenize(item.explanation).empty()) {
            ++result.failed;  // backend failure or unevaluable output
            continue;
        }
        pairs.emplace_back(&item, it->second);
    }
    if (pairs.empty()) throw EmptyInput("no successful predictions to evaluate");

    std::vector<MetricReport> rows(pairs.size());
    const std::size_t workers =
        std::min<std::size_t>(std::thread::hardware_concurrency() > 0
                                  ? std::thread::hardware_concurrency()
                                  : 1,
                              pairs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= pairs.size()) return;
            rows[i] = evaluate_pair(pairs[i].first->explanation,
                                    pairs[i].second->gold_explanation, encoder, lm);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    result.per_record.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i)
        result.per_record.emplace_back(pairs[i].first->idiom_id, rows[i]);
    result.corpus_mean = mean_report(rows);
    result.evaluated = rows.size();
    return result;
}

EvaluationResult evaluate_predictions(const PredictionSet& predictions,
                                      std::span<const IdiomRecord> gold_records,
                                      const Encoder& encoder) {
    std::vector<std::string> references;
    references.reserve(gold_records.size());
    for (const auto& rec : gold_records) references.push_back(rec.gold_explanation);
    return evaluate_predictions(predictions, gold_records, encoder,
                                UnigramLm::fit_texts(references));
}

double exact_match_rate(const PredictionSet& predictions,
                        std::span<const IdiomRecord> gold_records) {
    if (predictions.items.empty()) throw EmptyInput("prediction set is empty");
    const auto gold_index = index_by_id(gold_records);
    std::size_t hits = 0;
    for (const auto& item : predictions.items) {
        auto it = gold_index.find(item.idiom_id);
        if (it == gold_index.end())
            throw JoinFailure("prediction id '" + item.idiom_id +
                              "' has no gold record");
        if (item.ok && item.explanation == it->second->gold_explanation) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(predictions.items.size());
}

namespace {

constexpr std::array<const char*, 15> kColumnNames = {
    "R-1", "R-2", "R-L", "B-1", "B-2", "B-3", "B-L", "BS",
    "MS",  "CD",  "JSD", "L2",  "L1",  "PS",  "FRS"};

// true = higher is better
constexpr std::array<bool, 15> kHigherIsBetter = {
    true, true, true, true, true, true, true, true,
    true, false, false, false, false, false, true};

std::array<double, 15> row_values(const MetricReport& r) {
    return {r.r1, r.r2, r.rl, r.b1, r.b2, r.b3, r.bl, r.bs,
            r.ms, r.cd, r.jsd, r.l2, r.l1, r.ps, r.frs};
}

std::string format_value(double v) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(4) << v;
    return out.str();
}

std::vector<std::size_t> best_row_per_column(std::span<const ReportRow> rows) {
    std::vector<std::size_t> best(15, 0);
    for (std::size_t col = 0; col < 15; ++col) {
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const double v = row_values(rows[i].second)[col];
            const double b = row_values(rows[best[col]].second)[col];
            if (kHigherIsBetter[col] ? v > b : v < b) best[col] = i;
        }
    }
    return best;
}

}  // namespace

std::string report_csv(std::span<const ReportRow> rows) {
    std::string out = "model,";
    out += kReportHeader;
    out += '\n';
    for (const auto& [name, report] : rows) {
        out += name;
        for (double v : row_values(report)) {
            out += ',';
            out += format_value(v);
        }
        out += '\n';
    }
    return out;
}

std::string report_text(std::span<const ReportRow> rows) {
    const auto best = best_row_per_column(rows);

    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> header{"model"};
    for (const char* name : kColumnNames) header.emplace_back(name);
    cells.push_back(header);

    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::vector<std::string> row{rows[i].first};
        const auto values = row_values(rows[i].second);
        for (std::size_t col = 0; col < 15; ++col) {
            std::string cell = format_value(values[col]);
            if (rows.size() > 1 && best[col] == i)
                cell += kHigherIsBetter[col] ? "↑" : "↓";
            row.push_back(std::move(cell));
        }
        cells.push_back(std::move(row));
    }

    // Column widths ignore the two-byte arrow suffix when aligning.
    auto display_width = [](const std::string& s) {
        std::size_t w = 0;
        for (unsigned char c : s)
            if ((c & 0xC0) != 0x80) ++w;
        return w;
    };
    std::vector<std::size_t> widths(cells[0].size(), 0);
    for (const auto& row : cells)
        for (std::size_t c = 0; c < row.size(); ++c)
            widths[c] = std::max(widths[c], display_width(row[c]));

    std::string out;
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += "  ";
            out += row[c];
            out.append(widths[c] - display_width(row[c]), ' ');
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        out += '\n';
    }
    return out;
}

void write_report(std::span<const ReportRow> rows,
                  const std::filesystem::path& csv_path,
                  const std::filesystem::path& text_path) {
    std::ofstream csv(csv_path);
    if (!csv) throw IoFailure("cannot write report: " + csv_path.string());
    csv << report_csv(rows);
    std::ofstream text(text_path);
    if (!text) throw IoFailure("cannot write report: " + text_path.string());
    text << report_text(rows);
}

void EvaluationResult::save(const std::filesystem::path& path) const {
    auto report_to_json = [](const MetricReport& r) {
        const auto values = row_values(r);
        json obj;
        for (std::size_t i = 0; i < 15; ++i) obj[kColumnNames[i]] = values[i];
        return obj;
    };
    json obj{{"kind", "hide-evaluation"},
             {"evaluated", evaluated},
             {"failed", failed},
             {"corpus_mean", report_to_json(corpus_mean)}};
    json records = json::array();
    for (const auto& [id, row] : per_record)
        records.push_back({{"idiom_id", id}, {"metrics", report_to_json(row)}});
    obj["per_record"] = std::move(records);

    std::ofstream out(path);
    if (!out) throw IoFailure("cannot write evaluation: " + path.string());
    out << obj.dump(2) << '\n';
}

EvaluationResult EvaluationResult::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open evaluation: " + path.string());
    json obj = json::parse(in, nullptr, false);
    if (obj.is_discarded() || obj.value("kind", "") != "hide-evaluation")
        throw FormatVersionMismatch("not an evaluation file: " + path.string());

    auto report_from_json = [](const json& j) {
        MetricReport r;
        r.r1 = j.at("R-1"); r.r2 = j.at("R-2"); r.rl = j.at("R-L");
        r.b1 = j.at("B-1"); r.b2 = j.at("B-2"); r.b3 = j.at("B-3");
        r.bl = j.at("B-L"); r.bs = j.at("BS"); r.ms = j.at("MS");
        r.cd = j.at("CD"); r.jsd = j.at("JSD"); r.l2 = j.at("L2");
        r.l1 = j.at("L1"); r.ps = j.at("PS"); r.frs = j.at("FRS");
        return r;
    };

    EvaluationResult result;
    result.evaluated = obj.at("evaluated").get<std::size_t>();
    result.failed = obj.at("failed").get<std::size_t>();
    result.corpus_mean = report_from_json(obj.at("corpus_mean"));
    for (const auto& rec : obj.at("per_record"))
        result.per_record.emplace_back(rec.at("idiom_id").get<std::string>(),
                                       report_from_json(rec.at("metrics")));
    return result;
}

}  // namespace hide
