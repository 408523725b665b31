use loplab::*;
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let mut task = SearchTask::llsm(8);
    task.edge_range = Some((10, 10));
    let out = search_llsm_violations(&task).unwrap();
    println!("llsm n=8 e=10: scanned={} connected={} hits={} in {:?}",
        out.summary.scanned, out.summary.connected, out.summary.hits, t0.elapsed());
    let p8a = DagPattern::new(8, &[(1,2),(1,7),(1,8),(2,3),(2,4),(3,5),(4,5),(5,6),(5,8),(6,7)]).unwrap();
    let p8b = DagPattern::new(8, &[(1,4),(1,8),(2,3),(2,8),(3,4),(4,5),(5,6),(5,7),(6,8),(7,8)]).unwrap();
    println!("  8a id {} hit: {}", p8a.id(), out.hits.iter().any(|h| h.pattern_id == p8a.id()));
    println!("  8b id {} hit: {}", p8b.id(), out.hits.iter().any(|h| h.pattern_id == p8b.id()));
}
