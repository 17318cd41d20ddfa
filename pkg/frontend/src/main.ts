// Wires the page together. Kept separate from rendering so contract tests
// can drive the full flow against a stubbed client.

import { ApiClient, ApiFailure, QueryResult } from './api.js';
import { getClientId, SessionState } from './state.js';
import {
    buildShell,
    markVote,
    renderResult,
    showServiceBanner,
    showToast,
} from './render.js';

export interface AskClient {
    ask(question: string, clientId: string, signal?: AbortSignal): Promise<QueryResult>;
    sendFeedback(questionId: string, position: number, helpful: boolean, clientId: string): Promise<void>;
}

export function initApp(root: HTMLElement, api: AskClient, storage: Storage): SessionState {
    buildShell(root);
    const state = new SessionState(getClientId(storage));

    const form = root.querySelector('#ask-form') as HTMLFormElement;
    const input = root.querySelector('#question-input') as HTMLInputElement;
    const button = root.querySelector('#ask-button') as HTMLButtonElement;

    input.addEventListener('input', () => {
        button.disabled = input.value.trim().length === 0;
    });

    // At most one ask in flight; a newer submit replaces the older request.
    let inflight: AbortController | null = null;

    form.addEventListener('submit', (event) => {
        event.preventDefault();
        const question = input.value.trim();
        if (!question) return;

        inflight?.abort();
        const controller = new AbortController();
        inflight = controller;

        api.ask(question, state.clientId, controller.signal)
            .then((result) => {
                if (controller.signal.aborted) return;
                state.showResult(result);
                renderResult(root, result);
            })
            .catch((error: unknown) => {
                if (controller.signal.aborted) return;
                if (error instanceof ApiFailure && error.status === 503) {
                    showServiceBanner(root, 'Service temporarily unavailable. Please try again shortly.');
                } else if (error instanceof ApiFailure) {
                    showServiceBanner(root, error.message);
                } else {
                    showServiceBanner(root, 'Network problem. Check your connection and retry.');
                }
            })
            .finally(() => {
                if (inflight === controller) inflight = null;
            });
    });

    root.addEventListener('click', (event) => {
        const target = event.target as HTMLElement;
        if (!target.matches('.vote-up, .vote-down')) return;
        if (!state.current) return;

        const position = Number(target.dataset.position);
        const helpful = target.dataset.helpful === 'true';
        const previous = state.voteFor(position);

        state.setVote(position, helpful);
        markVote(root, position, helpful);

        api.sendFeedback(state.current.question_id, position, helpful, state.clientId)
            .catch(() => {
                // revert optimistic state so buttons reflect what the server has
                if (previous === undefined) {
                    state.votes.delete(position);
                } else {
                    state.setVote(position, previous);
                }
                markVote(root, position, previous);
                showToast(root, 'Could not record your vote. Please try again.');
            });
    });

    return state;
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
    initApp(document.getElementById('app') as HTMLElement, new ApiClient(), window.localStorage);
}
