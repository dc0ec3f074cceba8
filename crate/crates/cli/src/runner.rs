//! Thread-parallel scenario execution with output identical to the
//! sequential run.

use fsoqkd_core::scenario::{
    block_transmittances, run_block, summarize, BlockRecord, ClassicalRow, RunOutput,
    ScenarioConfig,
};
use fsoqkd_core::signal::build_constellation;
use fsoqkd_core::Error;
use std::sync::Mutex;

/// Runs every block on `threads` workers. Blocks depend only on per-block
/// derived seeds, so rows are computed independently and reassembled in
/// block order; the result is identical to `fsoqkd_core::scenario::run`.
pub fn run_parallel(cfg: &ScenarioConfig, threads: usize) -> Result<RunOutput, Error> {
    cfg.validate()?;
    if threads <= 1 {
        return fsoqkd_core::scenario::run(cfg);
    }
    let constellation =
        build_constellation(cfg.constellation_order, cfg.shaping_nu, cfg.security.va)?;
    let t_blocks = block_transmittances(cfg)?;
    let n = cfg.n_blocks;
    let slots: Mutex<Vec<Option<(BlockRecord, Option<ClassicalRow>)>>> =
        Mutex::new((0..n).map(|_| None).collect());
    let next = std::sync::atomic::AtomicUsize::new(0);
    let failure: Mutex<Option<Error>> = Mutex::new(None);

    std::thread::scope(|scope| {
        for _ in 0..threads.min(n) {
            scope.spawn(|| loop {
                let b = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if b >= n {
                    break;
                }
                match run_block(cfg, &constellation, b, t_blocks[b]) {
                    Ok(pair) => {
                        slots.lock().unwrap()[b] = Some(pair);
                    }
                    Err(e) => {
                        *failure.lock().unwrap() = Some(e);
                        break;
                    }
                }
            });
        }
    });

    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let mut rows = Vec::with_capacity(n);
    let mut classical_rows = Vec::new();
    for slot in slots.into_inner().unwrap() {
        let (row, class) = slot.expect("all blocks finished");
        rows.push(row);
        if let Some(c) = class {
            classical_rows.push(c);
        }
    }
    let summary = summarize(&rows)?;
    Ok(RunOutput {
        rows,
        classical_rows,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use fsoqkd_core::turbulence::{preset, PresetLabel};

    #[test]
    fn parallel_schedules_match_sequential() {
        let cfg = ScenarioConfig {
            turbulence: Some(preset(PresetLabel::C)),
            preset_label: Some(PresetLabel::C),
            n_blocks: 7,
            block_symbols: 20_000,
            pilot_amplitude: 60.0,
            master_seed: 21,
            ..ScenarioConfig::default()
        };
        let seq = fsoqkd_core::scenario::run(&cfg).unwrap();
        for threads in [2usize, 3, 8] {
            let par = run_parallel(&cfg, threads).unwrap();
            assert_eq!(seq, par, "threads = {threads}");
        }
    }
}
