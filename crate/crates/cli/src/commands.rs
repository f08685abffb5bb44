use std::fs;
use std::io::{self, BufRead, Write};
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use lectometer::audio::score_audio;
use lectometer::eval::{evaluate, parse_alignment, render_evaluation_text};
use lectometer::fusion::{
    parse_report_csv, parse_report_json, render_report, score_session, speech_at, FrameScore,
    ReportFormat, StreamScorer,
};
use lectometer::observation::{
    encode_wav, parse_annotations, parse_frame_line, parse_frame_stream, parse_wav, parse_words,
    write_frame_stream, write_words, AudioTrack, WordTimeline,
};
use lectometer::synth::{synthesize, ModalityOverrides, SynthProfile};

use crate::config::resolve;
use crate::{EvalArgs, ScoreArgs, StreamArgs, SynthArgs};

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_audio(path: &Path) -> Result<AudioTrack> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    parse_wav(&bytes).with_context(|| format!("decoding {}", path.display()))
}

fn read_words(path: &Path) -> Result<WordTimeline> {
    parse_words(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))
}

/// Output failures are this program's problem, not the input's.
fn write_file(dir: &Path, name: &str, bytes: impl AsRef<[u8]>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| anyhow!("writing {}: {e}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| anyhow!("creating {}: {e}", dir.display()))
}

fn score_line(s: &FrameScore) -> String {
    let p = &s.parts;
    format!(
        "SCORE t_ms={} frame={} expression={} activity={} pose={} hand={} speech={} total={}",
        s.t_ms, s.frame_idx, p.expression, p.activity, p.pose, p.hand, p.speech, s.total
    )
}

pub fn score(a: ScoreArgs) -> Result<()> {
    let cfg = resolve(&a.engine)?;
    let fps = cfg.fps()?;
    let mut session = parse_frame_stream(&read_text(&a.frames)?, fps)
        .with_context(|| format!("parsing {}", a.frames.display()))?;
    if let Some(p) = &a.audio {
        session = session.with_audio(read_audio(p)?);
    }
    if let Some(p) = &a.words {
        session = session.with_words(read_words(p)?);
    }
    let report = score_session(&session, &cfg.engine)?;

    ensure_dir(&a.out)?;
    write_file(
        &a.out,
        "report.json",
        render_report(&report, ReportFormat::Json),
    )?;
    if a.format == ReportFormat::Csv {
        write_file(
            &a.out,
            "report.csv",
            render_report(&report, ReportFormat::Csv),
        )?;
    }
    println!(
        "frames={} average={:.3} alerts={}",
        report.frame_count,
        report.average_score,
        report.alerts.len()
    );
    Ok(())
}

pub fn stream(a: StreamArgs) -> Result<()> {
    let cfg = resolve(&a.engine)?;
    let fps = cfg.fps()?;
    let audio = a.audio.as_deref().map(read_audio).transpose()?;
    let words = a.words.as_deref().map(read_words).transpose()?;
    // Speech windows span whatever sidecar data was supplied.
    let audio_end = audio.as_ref().map_or(0, |t| t.duration_ms().ceil() as u64);
    let words_end = words
        .as_ref()
        .and_then(|w| w.last_ms())
        .map_or(0, |t| t + 1);
    let windows = score_audio(
        audio.as_ref(),
        words.as_ref(),
        audio_end.max(words_end),
        &cfg.engine.audio,
    );

    let mut scorer = StreamScorer::new(cfg.engine, fps);
    let mut out = io::stdout().lock();
    let emit = |out: &mut io::StdoutLock, text: &str| -> Result<()> {
        writeln!(out, "{text}")
            .and_then(|_| out.flush())
            .map_err(|e| anyhow!("writing to standard output: {e}"))
    };
    for (i, line) in io::stdin().lock().lines().enumerate() {
        let line = line.context("reading standard input")?;
        if line.trim().is_empty() {
            continue;
        }
        let step = parse_frame_line(&line, i + 1).and_then(|obs| {
            let speech = speech_at(&windows, obs.t_ms, cfg.engine.audio.window_ms);
            scorer.step(&obs, speech)
        });
        match step {
            Ok(o) => {
                emit(&mut out, &score_line(&o.score))?;
                if let Some(alert) = o.alert {
                    emit(&mut out, &alert.to_string())?;
                }
            }
            Err(lectometer::Error::Ordering(msg)) => {
                eprintln!("skipped line {}: {msg}", i + 1)
            }
            Err(e) => eprintln!("skipped: {e}"),
        }
    }
    Ok(())
}

pub fn eval(a: EvalArgs) -> Result<()> {
    let text = read_text(&a.report)?;
    let is_csv = a
        .report
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let frames = if is_csv {
        parse_report_csv(&text)
    } else {
        parse_report_json(&text).map(|r| r.frames)
    }
    .with_context(|| format!("parsing {}", a.report.display()))?;
    let ann = parse_annotations(&read_text(&a.annotations)?)
        .with_context(|| format!("parsing {}", a.annotations.display()))?;
    let alignment = match &a.items {
        Some(p) => Some(
            parse_alignment(&read_text(p)?).with_context(|| format!("parsing {}", p.display()))?,
        ),
        None => None,
    };
    let evaluation = evaluate(&frames, &ann, alignment.as_ref(), a.alpha)?;

    let text = render_evaluation_text(&evaluation);
    let mut json = serde_json::to_string_pretty(&evaluation)?;
    json.push('\n');
    ensure_dir(&a.out)?;
    write_file(&a.out, "evaluation.json", json)?;
    write_file(&a.out, "evaluation.txt", &text)?;
    print!("{text}");
    Ok(())
}

pub fn synth(a: SynthArgs) -> Result<()> {
    let cfg = resolve(&a.engine)?;
    let profile = SynthProfile {
        quality: a.quality,
        duration_ms: a.duration_ms,
        fps: cfg.fps.unwrap_or(30.0),
        seed: a.seed,
        overrides: ModalityOverrides {
            expression: a.p_expression,
            activity: a.p_activity,
            pose: a.p_pose,
            hand: a.p_hand,
            speech: a.p_speech,
        },
    };
    let s = synthesize(&profile, &cfg.engine.audio)?;

    let mut truth = serde_json::to_string_pretty(&s.truth)?;
    truth.push('\n');
    ensure_dir(&a.out)?;
    write_file(&a.out, "frames.jsonl", write_frame_stream(&s.frames))?;
    write_file(&a.out, "words.jsonl", write_words(&s.words))?;
    write_file(&a.out, "audio.wav", encode_wav(&s.audio))?;
    write_file(&a.out, "truth.json", truth)?;
    Ok(())
}
