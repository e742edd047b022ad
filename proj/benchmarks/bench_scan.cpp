// Scanner-side costs: layout compilation and the content match pipeline.

#include "pcaad/catalog.hpp"
#include "pcaad/enumerate.hpp"
#include "pcaad/signature.hpp"

#include <benchmark/benchmark.h>

#include <cstdint>

namespace {

void BM_CompileCatalog(benchmark::State& state) {
    const pcaad::Catalog& catalog = pcaad::builtin_catalog();
    for (auto _ : state)
        for (const pcaad::FbDecl& decl : catalog.decls)
            benchmark::DoNotOptimize(pcaad::compile_layout(decl));
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(catalog.decls.size()));
}
BENCHMARK(BM_CompileCatalog);

// Content shaped like a live MODBUS_COMM_LOAD block: defaults in place, null
// space zeroed, so the match walks the full pipeline including tie-breaks.
pcaad::Bytes modbus_like_content() {
    pcaad::Bytes content(22, 0x00);
    content[6] = 0x25; // BAUD 9600 big-endian at 4..7
    content[7] = 0x80;
    content[16] = 0x03; // RESP_TO 1000 at 16..17
    content[17] = 0xe8;
    return content;
}

void BM_MatchByContent(benchmark::State& state) {
    const pcaad::SignatureSet sigs = pcaad::build_signature_set(pcaad::builtin_catalog());
    const pcaad::Bytes content = modbus_like_content();
    for (auto _ : state) benchmark::DoNotOptimize(pcaad::match_by_content(sigs, content));
}
BENCHMARK(BM_MatchByContent);

void BM_ClassifyContent(benchmark::State& state) {
    const pcaad::SignatureSet sigs = pcaad::build_signature_set(pcaad::builtin_catalog());
    const pcaad::Bytes content = modbus_like_content();
    for (auto _ : state) benchmark::DoNotOptimize(pcaad::classify_content(sigs, 5, content));
}
BENCHMARK(BM_ClassifyContent);

} // namespace

BENCHMARK_MAIN();
