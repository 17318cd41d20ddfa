// DOM construction. Everything here is a pure function of the data passed
// in: no fetches, no re-ranking, no score math beyond display formatting.

import { QueryResult, ScoredAnswer, ScoredExamQA } from './api.js';

export function formatConfidence(score: number): string {
    return `${(100 * score).toFixed(1)}%`;
}

// Presentation band for a similarity score shown as confidence.
export function confidenceBand(score: number): 'high' | 'mid' | 'low' {
    if (score >= 0.7) return 'high';
    if (score >= 0.4) return 'mid';
    return 'low';
}

export function buildShell(root: HTMLElement): void {
    root.innerHTML = `
        <header>
            <h1>Ask a science question</h1>
        </header>
        <form id="ask-form">
            <input id="question-input" type="text" autocomplete="off"
                   placeholder="e.g. What is osmosis?">
            <button id="ask-button" type="submit" disabled>Ask</button>
        </form>
        <div id="banner" class="hidden"></div>
        <section id="answers"></section>
        <section id="related"></section>
        <div id="toast" class="hidden"></div>
    `;
}

function answerCard(answer: ScoredAnswer, position: number): HTMLElement {
    const card = document.createElement('article');
    card.className = 'answer-card';
    card.dataset.position = String(position);

    const badge = document.createElement('span');
    badge.className = `confidence confidence-${confidenceBand(answer.score)}`;
    badge.textContent = formatConfidence(answer.score);
    card.appendChild(badge);

    const text = document.createElement('p');
    text.className = 'answer-text';
    text.textContent = answer.text;
    card.appendChild(text);

    for (const figure of answer.figures) {
        const wrap = document.createElement('figure');
        const img = document.createElement('img');
        img.src = figure.uri;
        img.alt = figure.caption;
        const caption = document.createElement('figcaption');
        caption.textContent = `${figure.label}: ${figure.caption}`;
        wrap.appendChild(img);
        wrap.appendChild(caption);
        card.appendChild(wrap);
    }

    const voting = document.createElement('div');
    voting.className = 'vote-row';
    const prompt = document.createElement('span');
    prompt.textContent = 'Was this helpful?';
    voting.appendChild(prompt);
    for (const helpful of [true, false]) {
        const button = document.createElement('button');
        button.type = 'button';
        button.className = helpful ? 'vote-up' : 'vote-down';
        button.dataset.position = String(position);
        button.dataset.helpful = String(helpful);
        button.textContent = helpful ? 'Yes' : 'No';
        voting.appendChild(button);
    }
    card.appendChild(voting);
    return card;
}

function relatedEntry(qa: ScoredExamQA): HTMLElement {
    const item = document.createElement('li');
    item.className = 'related-entry';

    const question = document.createElement('p');
    question.className = 'related-question';
    question.textContent = `${qa.question} (${formatConfidence(qa.score)})`;
    item.appendChild(question);

    const answer = document.createElement('p');
    answer.className = 'related-answer';
    answer.textContent = qa.answer;
    item.appendChild(answer);
    return item;
}

export function renderResult(root: HTMLElement, result: QueryResult): void {
    const banner = root.querySelector('#banner') as HTMLElement;
    const answers = root.querySelector('#answers') as HTMLElement;
    const related = root.querySelector('#related') as HTMLElement;

    answers.innerHTML = '';
    related.innerHTML = '';

    if (!result.answered) {
        banner.textContent = result.message ?? 'This question could not be answered.';
        banner.className = 'banner-no-answer';
    } else {
        banner.textContent = '';
        banner.className = 'hidden';
        result.answers.forEach((answer, i) => {
            answers.appendChild(answerCard(answer, i + 1));
        });
    }

    if (result.related.length > 0) {
        const heading = document.createElement('h2');
        heading.textContent = 'Related past exam questions';
        related.appendChild(heading);
        const list = document.createElement('ul');
        for (const qa of result.related) {
            list.appendChild(relatedEntry(qa));
        }
        related.appendChild(list);
    }
}

export function showServiceBanner(root: HTMLElement, text: string): void {
    const banner = root.querySelector('#banner') as HTMLElement;
    banner.textContent = text;
    banner.className = 'banner-error';
}

export function markVote(root: HTMLElement, position: number, helpful: boolean | undefined): void {
    const up = root.querySelector(`.vote-up[data-position="${position}"]`);
    const down = root.querySelector(`.vote-down[data-position="${position}"]`);
    up?.classList.toggle('selected', helpful === true);
    down?.classList.toggle('selected', helpful === false);
}

export function showToast(root: HTMLElement, text: string): void {
    const toast = root.querySelector('#toast') as HTMLElement;
    toast.textContent = text;
    toast.className = 'toast';
}
