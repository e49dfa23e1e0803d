//! Encrypt/decrypt throughput on a corpus clip, rayon pool versus one thread.
//!
//! Built with `--no-default-features` the library never touches rayon, so
//! both arms measure the sequential path.

use std::hint::black_box;
use std::path::Path;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::ThreadPoolBuilder;
use svcrypt::codec::{DEFAULT_GOP, DEFAULT_QP};
use svcrypt::keys::{MasterKey, ShuffleKey};
use svcrypt::metrics::{load_corpus, source_file};
use svcrypt::schemes::{self, SchemeId, SchemeParams};

const CLIP: &str = "coffee";

fn pipeline(c: &mut Criterion) {
    let corpus = load_corpus(&Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")).expect("corpus");
    let clip = corpus.iter().find(|c| c.name == CLIP).expect("clip present");
    let master = MasterKey::new(&[7u8; 16]).unwrap();
    let single = ThreadPoolBuilder::new().num_threads(1).build().unwrap();

    for scheme in [SchemeId::Proposed, SchemeId::Full, SchemeId::Crisscross] {
        let svc = source_file(scheme, clip, DEFAULT_QP, DEFAULT_GOP).unwrap();
        let params = SchemeParams::new(scheme);
        let key = ShuffleKey::generate();
        let encrypt = || schemes::encrypt_with_key(black_box(svc.clone()), &master, &params, key).unwrap();

        let mut g = c.benchmark_group(format!("encrypt/{}", scheme.name()));
        g.sample_size(20);
        g.bench_function(BenchmarkId::from_parameter("rayon"), |b| b.iter(encrypt));
        g.bench_function(BenchmarkId::from_parameter("sequential"), |b| b.iter(|| single.install(encrypt)));
        g.finish();

        let (enc, _) = encrypt();
        let decrypt = || schemes::decrypt(black_box(enc.clone()), &master).unwrap();
        let mut g = c.benchmark_group(format!("decrypt/{}", scheme.name()));
        g.sample_size(20);
        g.bench_function(BenchmarkId::from_parameter("rayon"), |b| b.iter(decrypt));
        g.bench_function(BenchmarkId::from_parameter("sequential"), |b| b.iter(|| single.install(decrypt)));
        g.finish();
    }
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
