//! Embeds two texts through an embeddings endpoint speaking
//! `{"model", "input"} -> {"data": [{"embedding"}]}` and prints their cosine.
//! The key, if any, is read from EMBEDDING_API_KEY.
//!
//!     cargo run --example remote_embeddings -- http://localhost:8000/v1/embeddings [model]

use schema_ensemble::semantic::{cosine, EmbeddingProvider, RemoteHttp};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let Some(endpoint) = std::env::args().nth(1) else {
        eprintln!("usage: remote_embeddings <endpoint> [model]");
        std::process::exit(3);
    };
    let model = std::env::args().nth(2).unwrap_or_else(|| "all-roberta-large-v1".into());
    let remote = RemoteHttp::new(endpoint, model, std::env::var("EMBEDDING_API_KEY").ok(), 4);
    let texts = [
        "Take a book from the table while your hands are free.".to_string(),
        "(:action take-from-table :parameters (?b - book) :precondition (and (on-table ?b) (hands-free)) :effect (and (holding ?b) (not (on-table ?b)) (not (hands-free))))".to_string(),
    ];
    let v = remote.embed_batch(&texts)?;
    println!("dimension {}, cosine {:.4}, requests {}", v[0].dimension(), cosine(&v[0], &v[1])?, remote.request_count());
    Ok(())
}
