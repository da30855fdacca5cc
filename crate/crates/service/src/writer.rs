//! Single-writer access to the store.
//!
//! One thread owns the [`Store`]; every command (and every read that must
//! see a consistent state) is queued to it and runs to completion before
//! the next one starts, in arrival order.

use std::sync::mpsc;
use std::thread;

use tagstock_core::Store;
use tokio::sync::oneshot;

type Job = Box<dyn FnOnce(&mut Store) + Send>;

#[derive(Clone, Debug)]
pub struct StoreHandle {
    jobs: mpsc::Sender<Job>,
}

impl StoreHandle {
    pub fn spawn(mut store: Store) -> Self {
        let (jobs, queue) = mpsc::channel::<Job>();
        thread::Builder::new()
            .name("store-writer".into())
            .spawn(move || {
                for job in queue {
                    job(&mut store);
                }
            })
            .expect("spawn store writer");
        StoreHandle { jobs }
    }

    /// Runs `f` on the store once all earlier jobs have finished.
    pub async fn run<R, F>(&self, f: F) -> R
    where
        F: FnOnce(&mut Store) -> R + Send + 'static,
        R: Send + 'static,
    {
        let (tx, rx) = oneshot::channel();
        self.jobs
            .send(Box::new(move |store| {
                let _ = tx.send(f(store));
            }))
            .expect("store writer is running");
        rx.await.expect("store writer answered")
    }
}
