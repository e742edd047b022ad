// Hot-path codecs: frame encode/decode, pointer encode, CRC.

#include "pcaad/spp/frame.hpp"
#include "pcaad/spp/wire_values.hpp"

#include <benchmark/benchmark.h>

#include <cstdint>

namespace {

void BM_EncodeFrame(benchmark::State& state) {
    pcaad::spp::Frame f;
    f.opcode = pcaad::spp::Opcode::ReadReq;
    f.request_id = 7;
    f.payload.assign(static_cast<std::size_t>(state.range(0)), 0xa5);
    for (auto _ : state) benchmark::DoNotOptimize(pcaad::spp::encode_frame(f));
    state.SetBytesProcessed(state.iterations() *
                            static_cast<std::int64_t>(f.payload.size() + pcaad::spp::kHeaderSize));
}
BENCHMARK(BM_EncodeFrame)->Arg(6)->Arg(256)->Arg(4096);

void BM_DecodeFrame(benchmark::State& state) {
    pcaad::spp::Frame f;
    f.opcode = pcaad::spp::Opcode::WriteReq;
    f.request_id = 7;
    f.payload.assign(static_cast<std::size_t>(state.range(0)), 0xa5);
    const pcaad::Bytes wire = pcaad::spp::encode_frame(f);
    for (auto _ : state) benchmark::DoNotOptimize(pcaad::spp::decode_frame(wire));
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(wire.size()));
}
BENCHMARK(BM_DecodeFrame)->Arg(6)->Arg(256)->Arg(4096);

void BM_EncodeIndirect(benchmark::State& state) {
    const auto a = pcaad::spp::IndirectAddress::to(1, 296);
    for (auto _ : state) benchmark::DoNotOptimize(pcaad::spp::encode_indirect(a));
}
BENCHMARK(BM_EncodeIndirect);

void BM_Crc16(benchmark::State& state) {
    const pcaad::Bytes body(static_cast<std::size_t>(state.range(0)), 0x5a);
    for (auto _ : state) benchmark::DoNotOptimize(pcaad::spp::crc16_ccitt(body));
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(body.size()));
}
BENCHMARK(BM_Crc16)->Arg(64)->Arg(4096);

} // namespace

BENCHMARK_MAIN();
